"""Command-line interface.

Documents are JSON, given as a file path or inline (``-`` reads stdin).
A produced verdict (UNSAT included) exits 0. Bad input exits 2 and a failed
internal cross-check exits 3.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import CayleyError, ConsistencyError, CyclicSystemError, InputError, StructuralError
from .grid import col_index
from .io import dumps, system_doc, system_from_doc, triangulation_doc, triangulation_from_doc
from .perms import (
    PermutationSystem,
    check_positions,
    classify_coordinates,
    dual_table,
    dual_system,
    find_cyclic_triple,
    is_spread_out,
    parse_perm,
    positions_from_system,
    staircase,
    system_from_triangulation,
)
from .pipelines import STAGES, run_pipeline
from .realize import realize_positions
from .skeleton import count_boundary_completions, extend_skeleton, lemma1_flags, skeleton_from_system
from .solver import Constraints, solve

EXIT_OK, EXIT_INPUT, EXIT_CONSISTENCY = 0, 2, 3


def load_doc(arg: str):
    if arg == "-":
        text = sys.stdin.read()
    elif arg.lstrip().startswith(("{", "[")):
        text = arg
    else:
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {arg}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {arg}: {exc.msg}") from None


def load_system(arg: str) -> PermutationSystem:
    return system_from_doc(load_doc(arg))


def load_positions(arg: str):
    doc = load_doc(arg)
    if isinstance(doc, dict):
        doc = doc.get("positions")
    if not isinstance(doc, list):
        raise InputError("positions must be a list of vectors")
    return check_positions(doc)


def parse_shape(text: str):
    try:
        n, d = (int(x) for x in text.replace("x", ",").split(","))
    except ValueError:
        raise InputError(f"shape must look like 3,4 (got {text!r})") from None
    return n, d


# --- subcommands ------------------------------------------------------------

def cmd_check_acyclic(args):
    s = load_system(args.system)
    triple = find_cyclic_triple(s)
    out = {"acyclic": triple is None}
    if triple is not None:
        out["witness"] = {"symbols": list(triple[:2]), "columns": "".join(triple[2])}
    return out


def cmd_dual(args):
    s = load_system(args.system)
    dual = dual_system(s)
    return {"dual": system_doc(dual), "labels": dual_table(s)}


def cmd_positions(args):
    return {"positions": [list(v) for v in positions_from_system(load_system(args.system))]}


def cmd_spread_out(args):
    u = load_positions(args.positions)
    return {"spread_out": is_spread_out(u), "coordinates": list(classify_coordinates(u))}


def cmd_staircase(args):
    if len(args.cols) != 2:
        raise InputError("--cols takes two column letters, e.g. AB")
    x, y = col_index(args.cols[0]), col_index(args.cols[1])
    return triangulation_doc(staircase(parse_perm(args.perm), x, y))


def cmd_extract(args):
    t = triangulation_from_doc(load_doc(args.triangulation))
    s = system_from_triangulation(t)
    return {"system": system_doc(s)}


def _constraints(args) -> Constraints:
    faces = {}
    for arg in args.face or ():
        t = triangulation_from_doc(load_doc(arg))
        faces[t.face] = t
    system = load_system(args.system) if args.system else None
    positions = load_positions(args.positions) if args.positions else None
    return Constraints(system=system, faces=faces, positions=positions)


def cmd_solve(args):
    shape = parse_shape(args.shape)
    res = solve(shape, _constraints(args), mode=args.mode, limit=args.limit,
                jobs=args.jobs, shuffle_seed=args.shuffle_seed)
    out = res.to_dict()
    out.pop("wall_time")
    return out


def cmd_boundary(args):
    s = load_system(args.system)
    count, found = count_boundary_completions(s)
    return {"count": count, "completions": [
        {f.label(): t.to_tokens() for f, t in sorted(sk.assignment.items(), key=lambda x: x[0].key())
         if f.dim == s.n + s.d - 3}
        for sk in found]}


def cmd_skeleton(args):
    s = load_system(args.system)
    out = {"flags": lemma1_flags(s)}
    if args.level is not None:
        if not out["flags"]["acyclic"]:
            raise CyclicSystemError(find_cyclic_triple(s))
        res = extend_skeleton(skeleton_from_system(s, with_dual=True), args.level, jobs=args.jobs)
        out["extension"] = {"level": args.level, "ok": res.ok,
                            "witness": res.witness.label() if res.witness else None}
    return out


def cmd_realize(args):
    u = load_positions(args.positions)
    r = realize_positions(u, count=args.count, jobs=args.jobs, shuffle_seed=args.shuffle_seed)
    return r.to_dict()


def cmd_reproduce(args):
    return run_pipeline(args.stage, jobs=args.jobs, shuffle_seed=args.shuffle_seed).to_dict()


# --- plumbing -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--shuffle-seed", type=int, default=None,
                        help="randomize candidate order (results stay canonical)")

    p = argparse.ArgumentParser(prog="cayleytri", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    add("check-acyclic", cmd_check_acyclic, "test a system for acyclicity").add_argument("system")
    add("dual", cmd_dual, "dual system of an acyclic system").add_argument("system")
    add("positions", cmd_positions, "unmixed positions of an acyclic system").add_argument("system")
    add("spread-out", cmd_spread_out, "test a position system").add_argument("positions")
    sp = add("staircase", cmd_staircase, "staircase triangulation of a prism")
    sp.add_argument("--perm", required=True)
    sp.add_argument("--cols", default="AB")
    add("extract", cmd_extract, "system of a triangulation").add_argument("triangulation")
    sp = add("solve", cmd_solve, "search for triangulations")
    sp.add_argument("--shape", required=True, help="n,d")
    sp.add_argument("--system")
    sp.add_argument("--positions")
    sp.add_argument("--face", action="append", help="fixed face triangulation (repeatable)")
    sp.add_argument("--mode", choices=("decide", "enumerate", "count"), default="decide")
    sp.add_argument("--limit", type=int)
    add("boundary", cmd_boundary, "boundary completions of a system").add_argument("system")
    sp = add("skeleton", cmd_skeleton, "equivalence flags and skeleton extension")
    sp.add_argument("system")
    sp.add_argument("--level", type=int)
    sp = add("realize", cmd_realize, "realize a position system")
    sp.add_argument("positions")
    sp.add_argument("--count", action="store_true")
    sp = add("reproduce", cmd_reproduce, "run a pipeline stage")
    sp.add_argument("stage", choices=STAGES)
    return p


def render_text(doc, indent=0) -> str:
    pad = "  " * indent
    if isinstance(doc, dict):
        lines = []
        for k, v in doc.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
        return "\n".join(lines)
    if isinstance(doc, list):
        return "\n".join(f"{pad}- {_scalar(v)}" if _flat(v) or not isinstance(v, (dict, list))
                         else render_text(v, indent + 1) for v in doc)
    return pad + _scalar(doc)


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v) -> str:
    if isinstance(v, list):
        return " ".join(map(str, v))
    if isinstance(v, dict):
        return "{}"
    return str(v)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = args.func(args)
    except (InputError, CyclicSystemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConsistencyError, StructuralError) as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except CayleyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(dumps(doc) if args.format == "json" else render_text(doc))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
