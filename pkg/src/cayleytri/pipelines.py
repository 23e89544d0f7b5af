"""End-to-end experiments, one function per stage (see ``STAGES``).

Every stage returns a :class:`RunManifest` and a JSON-ready artifact. The
artifact never depends on ``jobs`` or ``shuffle_seed``.
"""

from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Dict, List, Optional, Sequence, Tuple

from .cayley import column_summands, unmixed_positions
from .errors import InputError, StructuralError
from .grid import (
    Cell,
    Face,
    Triangulation,
    as_shape,
    cell_key,
    col_label,
    is_spanning_tree,
    make_cell,
)
from .io import RunManifest, digest, face_doc, system_doc, triangulation_doc
from .perms import (
    PermutationSystem,
    delete_symbols,
    dual_table,
    dual_system,
    extract_permutation,
    is_acyclic,
    is_spread_out,
    positions_from_system,
    staircase,
    system_from_triangulation,
)
from .realize import STRIP, realize_positions, reduce
from .skeleton import (
    SkeletonTriangulation,
    all_level2_skeletons,
    boundary_completions,
    boundary_of,
    extend_skeleton,
    facet_table,
    faces_of,
    lemma1_flags,
    simplex_face_triangulation,
    two_skeleton_from_system,
)
from .solver import Constraints, solve

STAGES = ("s31", "s32", "spread-chain", "parity", "lemma1")

# Labelled reference data. Each search below finds a whole symmetry class of
# answers; these pick the labelled representative.
BOUNDARY_PAIR = ("A1 D1 D2 A3 C3", "A1 D1 B2 D2 A3")
FIVE_POSITIONS = ((0, 3, 1, 0), (2, 1, 1, 0), (0, 1, 1, 2), (1, 0, 2, 1), (1, 2, 0, 1))
CHAIN_PLAN = ((STRIP, 2), (STRIP, 1))


@dataclass
class StageResult:
    manifest: RunManifest
    artifact: dict
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"manifest": self.manifest.to_dict(), "artifact": self.artifact}


def _finish(command, params, shape, artifact, t0, nodes=0, verdicts=None, counts=None,
            digests=None, data=None) -> StageResult:
    m = RunManifest(command=command, params=params, shape=shape, digests=digests or {},
                    verdicts=verdicts or {}, counts=counts or {}, nodes=nodes,
                    wall_time=time.perf_counter() - t0, artifact_digest=digest(artifact))
    return StageResult(m, artifact, data or {})


def _tri_key(t: Triangulation) -> tuple:
    return tuple(cell_key(c) for c in t.cells)


def _facet_key(sk: SkeletonTriangulation) -> tuple:
    return tuple((f.key(), _tri_key(t)) for f, t in sorted(facet_table(sk).items(),
                                                          key=lambda x: x[0].key()))


def _tokens(cell: Cell) -> list:
    # column-major order, the way the labelled cells are written
    return [f"{col_label(c)}{r}" for r, c in sorted(cell, key=lambda v: (v[1], v[0]))]


# --- systems ----------------------------------------------------------------

def all_systems(n: int, d: int):
    """Every system of permutations of ``[n]`` on ``d`` columns."""
    edges = list(combinations(range(d), 2))
    perms = list(permutations(range(1, n + 1)))
    for choice in product(perms, repeat=len(edges)):
        yield PermutationSystem(n, d, tuple(zip(edges, choice)))


def acyclic_systems_from_duals(n: int, d: int) -> Tuple[List[PermutationSystem], dict]:
    """Acyclic systems of shape ``(n, d)`` built from every candidate dual
    (one permutation of the ``d`` columns per row pair)."""
    edges = list(combinations(range(n), 2))
    perms = list(permutations(range(1, d + 1)))
    stats = {"dual_candidates": 0, "acyclic_duals": 0, "systems": 0}
    out = []
    for choice in product(perms, repeat=len(edges)):
        stats["dual_candidates"] += 1
        dual = PermutationSystem(d, n, tuple(zip(edges, choice)))
        if not is_acyclic(dual):
            continue
        stats["acyclic_duals"] += 1
        s = dual_system(dual)
        if is_acyclic(s) and dual_system(s) == dual:
            out.append(s)
    out.sort(key=lambda s: s.perms)
    stats["systems"] = len(out)
    return out, stats


def realizations_by_system(shape, jobs=1, shuffle_seed=None):
    res = solve(shape, mode="enumerate", jobs=jobs, shuffle_seed=shuffle_seed)
    groups: Dict[PermutationSystem, List[Triangulation]] = defaultdict(list)
    for t in res.triangulations:
        groups[system_from_triangulation(t)].append(t)
    return groups, res


# --- boundary diagnosis -------------------------------------------------------

def forced_cells(rows, cols, facets: Dict[Face, Triangulation]) -> Dict[Cell, List[Cell]]:
    """Full cells forced by pairs of boundary cells.

    Two boundary cells on different facets that share a ridge, and whose union
    is a full cell, leave no room around that ridge: any extension must
    contain the union.
    """
    owner = {c: f for f, t in facets.items() for c in t.cells}
    cells = sorted(owner, key=cell_key)
    size = len(rows) + len(cols) - 2
    out: Dict[Cell, List[Cell]] = {}
    for b1, b2 in combinations(cells, 2):
        if owner[b1] == owner[b2] or len(b1 & b2) != size - 1:
            continue
        u = b1 | b2
        if is_spanning_tree(u, rows, cols):
            out.setdefault(u, []).extend((b1, b2))
    return out


def diagnose(system: PermutationSystem, bad: Dict[Face, Triangulation],
             realizations: List[Triangulation]) -> List[dict]:
    """Forced cells that no realization contains, each with the cells of every
    realization that have the same summands on the columns where the forced
    cell is mixed."""
    shape = system.shape
    forced = forced_cells(shape.rows, shape.cols, bad)
    used = {c for t in realizations for c in t.cells}
    out = []
    for s in sorted(forced, key=cell_key):
        if s in used:
            continue
        owners = sorted(set(forced[s]), key=cell_key)
        summands = column_summands(s)
        mixed = {x: rs for x, rs in summands.items() if len(rs) > 1}
        candidates = []
        for t in realizations:
            hits = [c for c in t.cells
                    if all(column_summands(c).get(x) == rs for x, rs in mixed.items())]
            candidates.append([_tokens(c) for c in sorted(hits, key=cell_key)])
        out.append({
            "missing": _tokens(s),
            "boundary_cells": [_tokens(b) for b in owners],
            "mixed_columns": {col_label(x): sorted(rs) for x, rs in sorted(mixed.items())},
            "candidates": candidates,
        })
    return out


# --- stage s31 ----------------------------------------------------------------

def stage_s31(jobs: int = 1, shuffle_seed=None, shape=(3, 4), full=3, boundary=4) -> StageResult:
    """Systems with ``full`` realizations but ``boundary`` boundary completions."""
    t0 = time.perf_counter()
    shape = as_shape(shape)
    systems, stats = acyclic_systems_from_duals(shape.n, shape.d)
    groups, enum = realizations_by_system(shape, jobs, shuffle_seed)
    nodes = enum.nodes
    missing = [s for s in groups if s not in set(systems)]
    if missing:
        raise StructuralError(f"a realized system is missing from the dual enumeration: {missing[0]}")
    qualifying = []
    for s in systems:
        if len(groups.get(s, ())) != full:
            continue
        found = boundary_completions(s)
        if len(found) == boundary:
            qualifying.append((s, found))
    pair = {make_cell(x.split()) for x in BOUNDARY_PAIR}
    records = []
    selected = None
    for s, found in qualifying:
        real = {_facet_key(boundary_of(t)) for t in groups[s]}
        bad = [b for b in found if _facet_key(b) not in real]
        rec = {"system": s, "bad": bad}
        if len(bad) == 1:
            rec["diagnosis"] = diagnose(s, facet_table(bad[0]), groups[s])
            if selected is None and any(
                    {make_cell(c) for c in d["boundary_cells"]} >= pair
                    for d in rec["diagnosis"]):
                selected = rec
        records.append(rec)
    if selected is None and records:
        selected = records[0]
    artifact = {
        "shape": [shape.n, shape.d],
        "dual_candidates": stats["dual_candidates"],
        "acyclic_systems": stats["systems"],
        "triangulations": enum.count,
        "qualifying_systems": len(qualifying),
        "single_bad_boundary": sum(1 for r in records if len(r["bad"]) == 1),
    }
    data = {"groups": groups}
    verdicts = {}
    if selected is not None:
        s = selected["system"]
        bad = facet_table(selected["bad"][0])
        cert = solve(shape, Constraints(faces=bad), mode="decide", jobs=jobs,
                     shuffle_seed=shuffle_seed)
        nodes += cert.nodes
        realized = groups[s]
        artifact["selected"] = {
            "system": system_doc(s),
            "dual": dual_table(s),
            "positions": [list(v) for v in positions_from_system(s)],
            "realizations": [triangulation_doc(t) for t in realized],
            "realization_positions": [[list(v) for v in unmixed_positions(t)] for t in realized],
            "boundary_completions": len(dict(qualifying)[s]),
            "bad_boundary": [dict(face_doc(f), cells=[_tokens(c) for c in t.cells])
                             for f, t in sorted(bad.items(), key=lambda x: x[0].key())],
            "bad_boundary_verdict": "SAT" if cert.satisfiable else "UNSAT",
            "diagnosis": selected["diagnosis"],
        }
        verdicts = {"bad_boundary": artifact["selected"]["bad_boundary_verdict"]}
        data.update(system=s, bad=bad, realizations=realized)
    counts = {"qualifying": len(qualifying), "triangulations": enum.count}
    return _finish("reproduce s31", {"jobs": jobs, "shuffle_seed": shuffle_seed},
                   (shape.n, shape.d), artifact, t0, nodes, verdicts, counts, data=data)


# --- stage s32 ----------------------------------------------------------------

def _relabel_cols(t: Triangulation, mapping: dict) -> Triangulation:
    return Triangulation(t.rows, tuple(mapping[c] for c in t.cols),
                         tuple(frozenset((r, mapping[c]) for r, c in cell) for cell in t.cells))


def unique_facet_extensions(target: Triangulation, n: int, jobs=1, shuffle_seed=None):
    """Systems of ``[n]`` on the columns of ``target`` whose only triangulation
    restricts to ``target`` on its rows. Returns ``(systems, stats)`` with
    systems keyed by global column pairs."""
    cols = target.cols
    face = Face(range(1, n + 1), cols)
    res = solve(face, Constraints(faces={target.face: target}), mode="enumerate",
                jobs=jobs, shuffle_seed=shuffle_seed)
    local = {c: k for k, c in enumerate(cols)}
    groups = defaultdict(list)
    for t in res.triangulations:
        groups[system_from_triangulation(_relabel_cols(t, local))].append(t)
    out = []
    nodes = res.nodes
    for s in sorted(groups, key=lambda s: s.perms):
        if len(groups[s]) != 1:
            continue
        total = solve((n, len(cols)), Constraints(system=s), mode="count", limit=2)
        nodes += total.nodes
        if total.count == 1:
            out.append({(cols[x], cols[y]): p for (x, y), p in s.perms})
    stats = {"triangulations": res.count, "systems": len(groups), "unique": len(out),
             "nodes": nodes}
    return out, stats


def join_facet_systems(options: List[List[dict]], n: int, d: int) -> List[PermutationSystem]:
    """All systems on ``d`` columns agreeing with one option per facet."""
    found = []

    def walk(k, acc):
        if k == len(options):
            found.append(PermutationSystem(n, d, tuple(acc.items())))
            return
        for opt in options[k]:
            if all(acc.get(e, p) == p for e, p in opt.items()):
                nxt = dict(acc)
                nxt.update(opt)
                walk(k + 1, nxt)

    walk(0, {})
    return sorted(set(found), key=lambda s: s.perms)


def stage_s32(s31: Optional[StageResult] = None, jobs: int = 1, shuffle_seed=None,
              extra: int = 2, certify_all: bool = False) -> StageResult:
    """Add ``extra`` symbols to the s31 system so that every column-triangle
    facet has a unique extension restricting to the bad boundary."""
    t0 = time.perf_counter()
    if s31 is None:
        s31 = stage_s31(jobs, shuffle_seed)
    base: PermutationSystem = s31.data["system"]
    bad: Dict[Face, Triangulation] = s31.data["bad"]
    n = base.n + extra
    d = base.d
    nodes = 0
    options, facet_stats = [], []
    for cols in combinations(range(d), 3):
        target = bad[Face(range(1, base.n + 1), cols)]
        opts, stats = unique_facet_extensions(target, n, jobs, shuffle_seed)
        nodes += stats.pop("nodes")
        options.append(opts)
        facet_stats.append(dict(stats, cols="".join(col_label(c) for c in cols)))
    joined = join_facet_systems(options, n, d)
    kill = set(range(base.n + 1, n + 1))
    for s in joined:
        if delete_symbols(s, kill)[0] != base or not is_acyclic(s):
            raise StructuralError("joined system does not restrict to the base system")
    selected = next((s for s in joined if positions_from_system(s) == FIVE_POSITIONS), None)
    if selected is None and joined:
        selected = joined[0]
    artifact = {"base": system_doc(base), "symbols": n, "facets": facet_stats,
                "joined_systems": len(joined)}
    verdicts = {}
    if selected is not None:
        to_certify = joined if certify_all else [selected]
        sat = []
        for s in to_certify:
            r = solve((n, d), Constraints(system=s), mode="decide", jobs=jobs,
                      shuffle_seed=shuffle_seed)
            nodes += r.nodes
            if s == selected:
                verdict, cands = ("SAT" if r.satisfiable else "UNSAT"), r.candidates
            if r.satisfiable:
                sat.append(s)
        artifact["selected"] = {
            "system": system_doc(selected),
            "dual": dual_table(selected),
            "positions": [list(v) for v in positions_from_system(selected)],
            "deletion": system_doc(delete_symbols(selected, kill)[0]),
            "verdict": verdict,
            "candidates": cands,
        }
        if certify_all:
            artifact["all_joined_unsat"] = not sat
        verdicts = {"extension": verdict}
    return _finish("reproduce s32", {"jobs": jobs, "shuffle_seed": shuffle_seed,
                                     "extra": extra, "certify_all": certify_all},
                   (n, d), artifact, t0, nodes, verdicts,
                   {"joined": len(joined)}, digests={"base": digest(system_doc(base))},
                   data={"system": selected, "joined": joined})


# --- spread-out chain -----------------------------------------------------------

def stage_spread_chain(u: Sequence[Sequence[int]] = FIVE_POSITIONS,
                       plan: Sequence[Tuple[str, int]] = CHAIN_PLAN,
                       jobs: int = 1, shuffle_seed=None) -> StageResult:
    t0 = time.perf_counter()
    u = tuple(tuple(v) for v in u)
    core, steps = reduce(u, plan)
    systems = [u] + [s.after for s in steps]
    real = realize_positions(u, jobs=jobs, shuffle_seed=shuffle_seed, plan=plan)
    greedy = realize_positions(u, jobs=jobs, shuffle_seed=shuffle_seed)
    artifact = {
        "input": [list(v) for v in u],
        "plan": [[k, c] for k, c in plan],
        "chain": [{"positions": [list(v) for v in p], "spread_out": is_spread_out(p)}
                  for p in systems],
        "steps": [s.to_dict() for s in steps],
        "realization": real.to_dict(),
        "greedy": greedy.to_dict(),
    }
    verdicts = {"planned": artifact["realization"]["verdict"],
                "greedy": artifact["greedy"]["verdict"]}
    return _finish("reproduce spread-chain", {"jobs": jobs, "shuffle_seed": shuffle_seed},
                   (len(u), len(u[0])), artifact, t0, verdicts=verdicts,
                   counts={"steps": len(steps)}, data={"realization": real, "steps": steps})


# --- skeleton parity ----------------------------------------------------------

def parity_shapes(max_sum: int = 7) -> List[tuple]:
    return [(n, s - n) for s in range(4, max_sum + 1) for n in range(2, s - 1)]


def level1_skeleton(shape) -> SkeletonTriangulation:
    shape = as_shape(shape)
    return SkeletonTriangulation(shape, 1, {f: simplex_face_triangulation(f)
                                            for f in faces_of(shape, 1)})


def prism_is_cyclic(face: Face, assignment) -> bool:
    """True if the squares of a ``3 x 2`` (or ``2 x 3``) face admit no common order."""
    if len(face.cols) == 2:
        x, y = sorted(face.cols)
        items = sorted(face.rows)
        orient = {}
        for a, b in combinations(items, 2):
            sigma = extract_permutation(assignment[Face((a, b), (x, y))], x)
            orient[(a, b)] = sigma[0] == a
    elif len(face.rows) == 2:
        flipped = {}
        for g, tr in assignment.items():
            if face.contains_face(g):
                t = tr.transpose()
                flipped[t.face] = t
        return prism_is_cyclic(Face(tuple(c + 1 for c in face.cols),
                                    tuple(r - 1 for r in face.rows)), flipped)
    else:
        return False
    a, b, c = items
    return orient[(a, b)] == orient[(b, c)] != orient[(a, c)]


def cyclic_prism() -> SkeletonTriangulation:
    """The 1-skeleton-coherent boundary of ``[3] x {A, B}`` whose three squares
    order the rows cyclically."""
    shape = as_shape((3, 2))
    assignment = {f: simplex_face_triangulation(f) for f in faces_of(shape, 2)
                  if len(f.rows) == 1 or len(f.cols) == 1}
    for sigma in ((1, 2), (2, 3), (3, 1)):
        t = staircase(sigma, 0, 1)
        assignment[t.face] = t
    return SkeletonTriangulation(shape, 2, assignment)


def stage_parity(max_sum: int = 7, s31: Optional[StageResult] = None,
                 max_squares: int = 12) -> StageResult:
    """Skeleton extension from level 1 to 2 and from 3 to 4 on every shape with
    ``n + d <= max_sum``, plus the two known obstructions (2 to 3 and 4 to 5).

    Level-3 skeletons are indexed by acyclic systems: every 3-face is a prism or
    a simplex, so the squares determine it. Level 2 to 3 is swept exhaustively
    where there are at most ``2 ** max_squares`` square choices.
    """
    t0 = time.perf_counter()
    rows = []
    exceptions = 0
    for n, d in parity_shapes(max_sum):
        shape = as_shape((n, d))
        rec = {"shape": [n, d]}
        rec["1to2"] = extend_skeleton(level1_skeleton(shape), 2).ok
        exceptions += not rec["1to2"]
        squares = (n * (n - 1) // 2) * (d * (d - 1) // 2)
        if shape.dim >= 3 and squares <= max_squares:
            fails = odd = 0
            for sk in all_level2_skeletons(shape):
                res = extend_skeleton(sk, 3, check=False)
                if not res.ok:
                    fails += 1
                    odd += not prism_is_cyclic(res.witness, sk.assignment)
            rec["2to3"] = {"skeletons": 2 ** squares, "failures": fails,
                           "failures_not_cyclic_prism": odd}
            exceptions += odd
        if shape.dim >= 4:
            count = fails = 0
            for s in all_systems(n, d):
                if not is_acyclic(s):
                    continue
                count += 1
                res3 = extend_skeleton(two_skeleton_from_system(s), 3, check=False)
                if not res3.ok or not extend_skeleton(res3.skeleton, 4, check=False).ok:
                    fails += 1
            rec["3to4"] = {"skeletons": count, "failures": fails}
            exceptions += fails
        rows.append(rec)
    prism = cyclic_prism()
    prism_res = extend_skeleton(prism, 3)
    obstructions = {"cyclic_prism_2to3": "extendable" if prism_res.ok else "non-extendable"}
    if s31 is not None and "bad" in s31.data:
        bad = s31.data["bad"]
        r = solve(s31.data["system"].shape, Constraints(faces=bad), mode="decide")
        obstructions["s31_boundary_4to5"] = "extendable" if r.satisfiable else "non-extendable"
    exceptions += sum(v == "extendable" for v in obstructions.values())
    artifact = {"shapes": rows, "obstructions": obstructions, "exceptions": exceptions}
    return _finish("reproduce parity", {"max_sum": max_sum, "max_squares": max_squares},
                   None, artifact, t0, verdicts=dict(obstructions),
                   counts={"shapes": len(rows), "exceptions": exceptions})


# --- equivalence battery -------------------------------------------------------

def stage_lemma1(shapes: Sequence[tuple] = ((3, 3), (3, 4), (4, 3))) -> StageResult:
    t0 = time.perf_counter()
    rows = []
    for n, d in shapes:
        total = agree = acyclic = 0
        bad = []
        for s in all_systems(n, d):
            flags = lemma1_flags(s)
            total += 1
            acyclic += flags["acyclic"]
            if len(set(flags.values())) == 1:
                agree += 1
            elif len(bad) < 5:
                bad.append({"system": system_doc(s), "flags": flags})
        rows.append({"shape": [n, d], "systems": total, "acyclic": acyclic,
                     "violations": total - agree, "examples": bad})
    artifact = {"shapes": rows}
    violations = sum(r["violations"] for r in rows)
    return _finish("reproduce lemma1", {"shapes": [list(s) for s in shapes]}, None, artifact,
                   t0, verdicts={"violations": violations},
                   counts={"systems": sum(r["systems"] for r in rows)})


def run_pipeline(stage: str, jobs: int = 1, shuffle_seed=None) -> StageResult:
    if stage == "s31":
        return stage_s31(jobs, shuffle_seed)
    if stage == "s32":
        return stage_s32(None, jobs, shuffle_seed)
    if stage == "spread-chain":
        return stage_spread_chain(jobs=jobs, shuffle_seed=shuffle_seed)
    if stage == "parity":
        return stage_parity(s31=stage_s31(jobs, shuffle_seed))
    if stage == "lemma1":
        return stage_lemma1()
    raise InputError(f"unknown stage {stage!r}; expected one of {', '.join(STAGES)}")
