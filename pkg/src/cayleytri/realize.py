"""Realizing systems of unmixed-simplex positions by triangulations.

Two reductions shrink a spread-out position system while preserving
realizability: dropping a coordinate that vanishes everywhere, and removing
the one vector that is zero on a coordinate positive in all the others.
Realizations of the reduced core are lifted back step by step, by coning
(for the removed vector) or by embedding on a facet and placing (for the
dropped coordinate).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .cayley import unmixed_positions
from .errors import InputError, StructuralError
from .grid import Face, Triangulation, restrict_triangulation, triangulation_is_valid
from .oracle import place_vertex
from .perms import check_positions, is_spread_out
from .solver import Constraints, solve

log = logging.getLogger(__name__)

Positions = Tuple[Tuple[int, ...], ...]

STRIP = "strip-positive-coordinate"
DROP = "drop-null-coordinate"


@dataclass(frozen=True)
class ReductionStep:
    """One reduction, with what is needed to undo it.

    ``removed`` is the 0-based index of the deleted vector (strip steps only),
    ``vector`` its value. ``before`` and ``after`` are the systems on either side.
    """

    kind: str
    coordinate: int
    before: Positions
    after: Positions
    removed: Optional[int] = None
    vector: Optional[Tuple[int, ...]] = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "coordinate": self.coordinate,
               "before": [list(v) for v in self.before],
               "after": [list(v) for v in self.after]}
        if self.removed is not None:
            out["removed"] = self.removed + 1
            out["vector"] = list(self.vector)
        return out


def drop_null_coordinate(u, coordinate: Optional[int] = None):
    """Delete the lowest (or the given) coordinate that is zero in every vector."""
    u = check_positions(u)
    d = len(u[0])
    if d < 2:
        return None
    coords = range(d) if coordinate is None else [coordinate]
    for i in coords:
        if all(v[i] == 0 for v in u):
            after = tuple(v[:i] + v[i + 1:] for v in u)
            return after, ReductionStep(DROP, i, u, after)
    return None


def reduce_positive_coordinate(u, coordinate: Optional[int] = None):
    """Remove the vector that is zero on a coordinate positive in all others.

    The remaining vectors lose one unit on that coordinate.
    """
    u = check_positions(u)
    n, d = len(u), len(u[0])
    if n < 2:
        return None
    coords = range(d) if coordinate is None else [coordinate]
    for i in coords:
        zeros = [k for k, v in enumerate(u) if v[i] == 0]
        if len(zeros) != 1:
            continue
        (k,) = zeros
        after = tuple(v[:i] + (v[i] - 1,) + v[i + 1:] for j, v in enumerate(u) if j != k)
        return after, ReductionStep(STRIP, i, u, after, removed=k, vector=u[k])
    return None


def reduce(u, plan: Sequence[Tuple[str, int]] = ()) -> Tuple[Positions, List[ReductionStep]]:
    """Apply the planned ``(kind, coordinate)`` steps, then both reductions
    greedily (null coordinates first, lowest coordinate first) down to a core."""
    u = check_positions(u)
    steps = []
    for kind, coordinate in plan:
        fn = {DROP: drop_null_coordinate, STRIP: reduce_positive_coordinate}.get(kind)
        if fn is None:
            raise InputError(f"unknown reduction {kind!r}")
        res = fn(u, coordinate)
        if res is None:
            raise InputError(f"{kind} does not apply to coordinate {coordinate} of {u}")
        u, step = res
        steps.append(step)
    while True:
        res = drop_null_coordinate(u) or reduce_positive_coordinate(u)
        if res is None:
            return u, steps
        u, step = res
        steps.append(step)


def glue_and_cone(t1: Triangulation, t2: Triangulation) -> Triangulation:
    """Cone ``t1`` (all rows but the last) and ``t2`` (all columns but one) to
    the vertex (last row, missing column).

    The two must agree on their common face.
    """
    rows = tuple(sorted(set(t1.rows) | set(t2.rows)))
    cols = tuple(sorted(set(t1.cols) | set(t2.cols)))
    apex_rows = set(rows) - set(t1.rows)
    apex_cols = set(cols) - set(t2.cols)
    if len(apex_rows) != 1 or len(apex_cols) != 1 or set(t2.rows) != set(rows) \
            or set(t1.cols) != set(cols):
        raise InputError("glue needs t1 missing one row and t2 missing one column")
    (r,), (v,) = apex_rows, apex_cols
    common = Face(t1.rows, t2.cols)
    a, b = restrict_triangulation(t1, common), restrict_triangulation(t2, common)
    if a != b:
        raise InputError(f"t1 and t2 disagree on the face {common.label()}")
    apex = (r, v)
    cells = tuple(c | {apex} for c in t1.cells) + tuple(c | {apex} for c in t2.cells)
    return Triangulation(rows, cols, cells)


def cone_and_place(t_prime: Triangulation, i: int, apex_row: Optional[int] = None) -> Triangulation:
    """Insert column ``i``: embed on the facet missing it, cone to
    ``(apex_row, i)`` and place the other vertices of column ``i`` in order.

    Always a triangulation extending ``t_prime``, but only the apex row is
    guaranteed to keep its position.
    """
    d = len(t_prime.cols) + 1
    if not 0 <= i < d:
        raise InputError(f"coordinate {i} out of range")
    shift = {c: c if c < i else c + 1 for c in t_prime.cols}
    rows = t_prime.rows
    cols = tuple(sorted(list(shift.values()) + [i]))
    apex_row = rows[0] if apex_row is None else apex_row
    first = (apex_row, i)
    cells = [frozenset((r, shift[c]) for r, c in cell) | {first} for cell in t_prime.cells]
    for r in rows:
        if r != apex_row:
            cells = place_vertex(cells, (r, i), rows, cols)
    return Triangulation(rows, cols, tuple(cells))


def _witness(domain, constraints: Constraints, jobs=1, shuffle_seed=None) -> Optional[Triangulation]:
    """A satisfying triangulation that does not depend on ``jobs`` or the seed.

    The verdict comes from the requested search; the witness is always the
    first hit of the plain sequential search.
    """
    res = solve(domain, constraints, mode="decide", jobs=jobs, shuffle_seed=shuffle_seed)
    if not res.satisfiable:
        return None
    if jobs > 1 or shuffle_seed is not None:
        res = solve(domain, constraints, mode="decide")
    return res.triangulations[0]


def _insert_zero(v, i):
    return tuple(v[:i]) + (0,) + tuple(v[i:])


def inull_lift(t_prime: Triangulation, i: int, jobs: int = 1, shuffle_seed=None):
    """An extension of ``t_prime`` (embedded on the facet missing column ``i``)
    whose unmixed positions are those of ``t_prime`` with a zero inserted at ``i``.

    Tries :func:`cone_and_place`; when that moves some position, an
    extension is found by search instead. Returns
    ``(triangulation or None, method)``.
    """
    t = cone_and_place(t_prime, i)
    want = tuple(_insert_zero(v, i) for v in unmixed_positions(t_prime))
    if unmixed_positions(t) == want:
        return t, "cone-and-place"
    shift = {c: c if c < i else c + 1 for c in t_prime.cols}
    facet = Triangulation(t_prime.rows, tuple(shift.values()),
                          tuple(frozenset((r, shift[c]) for r, c in cell) for cell in t_prime.cells))
    found = _witness(t.face, Constraints(faces={facet.face: facet}, positions=want),
                     jobs, shuffle_seed)
    return found, "facet search"


def _relabel_rows(t: Triangulation, mapping: dict) -> Triangulation:
    return Triangulation(tuple(mapping[r] for r in t.rows), t.cols,
                         tuple(frozenset((mapping[r], c) for r, c in cell) for cell in t.cells))


def _first_realization(u: Positions, jobs=1, shuffle_seed=None) -> Optional[Triangulation]:
    n, d = len(u), len(u[0])
    if n == 1 or d == 1:
        shape = (n, d)
        return Triangulation.of_shape(shape, [Face.full(shape).vertices()])
    return _witness((n, d), Constraints(positions=u), jobs, shuffle_seed)


def _lift_strip(t1: Triangulation, step: ReductionStep, jobs=1, shuffle_seed=None):
    """Undo a strip step: realize the removed vector on the facet and glue."""
    n = len(step.before)
    d = len(step.before[0])
    k, i = step.removed, step.coordinate
    # t1 uses rows 1..n-1; the removed vector becomes row n for the glue
    facet_cols = tuple(c for c in range(d) if c != i)
    fixed = restrict_triangulation(t1, Face(t1.rows, facet_cols))
    want = tuple(x for c, x in enumerate(step.vector) if c != i)
    if d - 1 == 1:
        t2 = Triangulation(tuple(range(1, n + 1)), facet_cols,
                           (Face(range(1, n + 1), facet_cols).vertices(),))
    else:
        positions = (None,) * (n - 1) + (want,)
        t2 = _witness(Face(range(1, n + 1), facet_cols),
                      Constraints(faces={fixed.face: fixed}, positions=positions),
                      jobs, shuffle_seed)
        if t2 is None:
            return None
    t = glue_and_cone(t1, t2)
    # move the glued row back to the slot of the removed vector
    mapping = {}
    for new in range(1, n):
        mapping[new] = new if new - 1 < k else new + 1
    mapping[n] = k + 1
    return _relabel_rows(t, mapping)


@dataclass
class Realization:
    spread_out: bool
    realizable: Optional[bool]
    triangulation: Optional[Triangulation] = None
    core: Optional[Positions] = None
    steps: List[ReductionStep] = field(default_factory=list)
    lifts: List[str] = field(default_factory=list)
    count: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "spread_out": self.spread_out,
            "verdict": {True: "SAT", False: "UNSAT", None: "REFUSED"}[self.realizable]
            if self.spread_out else "NOT-SPREAD-OUT",
            "core": [list(v) for v in self.core] if self.core is not None else None,
            "steps": [s.to_dict() for s in self.steps],
            "lifts": list(self.lifts),
            "count": self.count,
            "triangulation": self.triangulation.to_tokens() if self.triangulation else None,
        }


def realize_positions(u, count: bool = False, jobs: int = 1, shuffle_seed=None,
                      plan: Sequence[Tuple[str, int]] = ()) -> Realization:
    """A triangulation whose unmixed simplices sit at ``u``, if one exists.

    Non-spread-out systems are refused outright. Otherwise the system is
    reduced to a core whose solution is lifted back step by step. If a
    lift gets stuck the unreduced instance is solved directly instead, which
    is recorded in ``lifts``. With ``count`` the number of realizations of
    ``u`` is computed as well. ``plan`` fixes the first reduction steps.
    """
    u = check_positions(u)
    if not is_spread_out(u):
        return Realization(False, False)
    core, steps = reduce(u, plan)
    out = Realization(True, None, core=core, steps=steps)
    t = _first_realization(core, jobs, shuffle_seed)
    if t is None:
        out.realizable = False
        out.lifts.append("core UNSAT")
    else:
        for step in reversed(steps):
            if step.kind == DROP:
                lifted, how = inull_lift(t, step.coordinate, jobs, shuffle_seed)
                ok = lifted is not None and unmixed_positions(lifted) == step.before
                out.lifts.append(f"{DROP} {step.coordinate} by {how}")
            else:
                lifted = _lift_strip(t, step, jobs, shuffle_seed)
                ok = lifted is not None and unmixed_positions(lifted) == step.before
                out.lifts.append(f"{STRIP} {step.coordinate}")
            if not ok:
                out.lifts[-1] += " failed, direct solve"
                lifted = _first_realization(step.before, jobs, shuffle_seed)
                if lifted is None:
                    raise StructuralError(f"reduction lost realizability at {step.before}")
            t = lifted
        if not triangulation_is_valid(t) or unmixed_positions(t) != u:
            raise StructuralError("lifted triangulation does not realize the input")
        out.realizable = True
        out.triangulation = t
    if count:
        n, d = len(u), len(u[0])
        if n == 1 or d == 1:
            out.count = 1
        else:
            out.count = solve((n, d), Constraints(positions=u), mode="count", jobs=jobs,
                              shuffle_seed=shuffle_seed).count
        if (out.count > 0) != bool(out.realizable):
            raise StructuralError("count disagrees with the realization verdict")
    return out


def minimal_counterexample_screen(u) -> bool:
    """Both necessary conditions for a smallest unrealizable spread-out system:
    every coordinate vanishes on at least two vectors and is nonzero on one."""
    u = check_positions(u)
    d = len(u[0])
    for i in range(d):
        zeros = sum(1 for v in u if v[i] == 0)
        if zeros < 2 or zeros == len(u):
            return False
    return True


def is_reducible(u) -> bool:
    return drop_null_coordinate(u) is not None or reduce_positive_coordinate(u) is not None
