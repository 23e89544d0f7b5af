"""Complete search for triangulations of a product face under constraints.

The search is a pseudo-manifold completion. Every triangulation has exactly
one cell containing a fixed generic interior point, so the root branches
over those cells. After that, some interior ridge covered by a single chosen
cell is picked (the one with fewest options) and the search branches over
the compatible candidates on its other side. A complex with no such ridge
left is a triangulation.
"""

from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError
from .grid import (
    Cell,
    Face,
    Triangulation,
    as_shape,
    cell_key,
    is_spanning_tree,
    restrict_triangulation,
    simplex_count,
)
from .perms import PermutationSystem, staircase

log = logging.getLogger(__name__)


@dataclass
class Constraints:
    """What a triangulation of the domain ``rows x cols`` must satisfy.

    ``system`` and ``positions`` are indexed by position within the sorted
    domain rows/columns, so they apply unchanged to any face. A ``None``
    entry in ``positions`` leaves that row free.
    """

    system: Optional[PermutationSystem] = None
    faces: Dict[Face, Triangulation] = field(default_factory=dict)
    positions: Optional[Tuple[Tuple[int, ...], ...]] = None
    must_contain: Tuple[Cell, ...] = ()

    def face_table(self, rows, cols) -> Dict[Face, Triangulation]:
        table = dict(self.faces)
        if self.system is not None:
            if (self.system.n, self.system.d) != (len(rows), len(cols)):
                raise InputError("system shape does not match the domain")
            for (x, y), perm in self.system.perms:
                sigma = [rows[k - 1] for k in perm]
                t = staircase(sigma, cols[x], cols[y])
                f = t.face
                if f in table and table[f] != t:
                    raise InputError(f"system clashes with the fixed triangulation of {f.label()}")
                table[f] = t
        return table

    def key(self) -> tuple:
        return (
            self.system,
            tuple(sorted((f.key(), t.cells and tuple(map(cell_key, t.cells))) for f, t in self.faces.items())),
            self.positions,
            tuple(sorted(map(cell_key, self.must_contain))),
        )


def generic_point(rows: Sequence[int], cols: Sequence[int]) -> Tuple[list, list]:
    """Integer row supplies and column demands with equal totals and no
    coincident partial sums (other than empty and total).

    A spanning tree's simplex contains the point iff its transportation flow
    is positive; genericity makes this strict for every tree.
    """
    n, d = len(rows), len(cols)
    base = 1
    while True:
        a = [base * d + 2 ** k for k in range(n)]
        b = [base * n + 2 ** (n + k) for k in range(d)]
        b[-1] += sum(a) - sum(b)
        if min(b) > 0 and _is_generic(a, b):
            return a, b
        base += 1


def _subset_sums(values):
    sums = {0: 1}
    for v in values:
        new = dict(sums)
        for s, k in sums.items():
            new[s + v] = new.get(s + v, 0) + k
        sums = new
    return sums


def _is_generic(a, b) -> bool:
    sa, sb = _subset_sums(a), _subset_sums(b)
    total = sum(a)
    if len(sa) != 2 ** len(a) or len(sb) != 2 ** len(b):
        return False
    common = set(sa) & set(sb)
    return common == {0, total}


def tree_flow(cell: Iterable, supply: dict, demand: dict) -> Optional[dict]:
    """Edge flows of the transportation problem on a spanning tree."""
    adj = {}
    for r, c in cell:
        adj.setdefault(("r", r), set()).add(("c", c))
        adj.setdefault(("c", c), set()).add(("r", r))
    excess = {("r", r): v for r, v in supply.items()}
    excess.update({("c", c): -v for c, v in demand.items()})
    flows = {}
    leaves = [u for u, nb in adj.items() if len(nb) == 1]
    while leaves:
        u = leaves.pop()
        if not adj[u]:
            continue
        (w,) = adj[u]
        e = (u[1], w[1]) if u[0] == "r" else (w[1], u[1])
        # flow row -> col on edge e
        flows[e] = excess[u] if u[0] == "r" else -excess[u]
        excess[w] += excess[u]
        excess[u] = 0
        adj[w].discard(u)
        adj[u].clear()
        if len(adj[w]) == 1:
            leaves.append(w)
    return flows


def contains_point(cell, supply, demand) -> bool:
    flows = tree_flow(cell, supply, demand)
    return len(flows) == len(cell) and all(f > 0 for f in flows.values())


@dataclass
class SolveResult:
    satisfiable: bool
    count: int
    triangulations: List[Triangulation]
    nodes: int
    candidates: int
    wall_time: float
    complete: bool = True

    def to_dict(self) -> dict:
        return {
            "verdict": "SAT" if self.satisfiable else "UNSAT",
            "count": self.count,
            "complete": self.complete,
            "nodes": self.nodes,
            "candidates": self.candidates,
            "wall_time": round(self.wall_time, 4),
            "triangulations": [t.to_tokens() for t in self.triangulations],
        }


def incidence_stack(cells: Sequence[Cell], rows, cols) -> np.ndarray:
    """Cells as a ``(K, n, d)`` boolean stack of incidence matrices."""
    ri = {r: k for k, r in enumerate(rows)}
    ci = {c: k for k, c in enumerate(cols)}
    m = np.zeros((len(cells), len(rows), len(cols)), dtype=bool)
    for k, cell in enumerate(cells):
        for r, c in cell:
            m[k, ri[r], ci[c]] = True
    return m


def _bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.matmul(a.astype(np.int32), b.astype(np.int32)) > 0


def proper_with_all(stack: np.ndarray, k: int) -> np.ndarray:
    """``intersect_properly(cells[k], cells[j])`` for every ``j`` at once.

    Same criterion as :func:`grid.intersect_properly`: orient ``cells[k]``
    row -> col and the other cell col -> row; they clash iff an edge of only
    one of them closes a directed cycle.
    """
    a = stack[k]
    b = stack
    n = a.shape[0]
    # one step row -> col (a) -> row (b), then its reflexive closure
    reach = _bool_matmul(a[None], np.swapaxes(b, 1, 2)) | np.eye(n, dtype=bool)
    for _ in range(max(1, (n - 1).bit_length())):
        reach = _bool_matmul(reach, reach)
    # col c reaches row r: c -> r' along b, then r' ~> r
    col_to_row = _bool_matmul(np.swapaxes(b, 1, 2), reach)
    # row r reaches col c: r ~> r', then r' -> c along a
    row_to_col = _bool_matmul(reach, a[None])
    clash = (a & ~b & np.swapaxes(col_to_row, 1, 2)).any(axis=(1, 2))
    clash |= (b & ~a & row_to_col).any(axis=(1, 2))
    return ~clash


class Search:
    def __init__(self, rows, cols, constraints: Optional[Constraints] = None, shuffle_seed=None):
        self.rows = tuple(sorted(rows))
        self.cols = tuple(sorted(cols))
        self.constraints = constraints or Constraints()
        self.target = simplex_count((len(self.rows), len(self.cols)))
        self.cells = candidate_cells(self.rows, self.cols, self.constraints)
        if shuffle_seed is not None:
            random.Random(shuffle_seed).shuffle(self.cells)
        self.index = {c: k for k, c in enumerate(self.cells)}
        self.row_set, self.col_set = set(self.rows), set(self.cols)
        self.ridges = []  # per candidate: interior ridges
        self.ridge_cands: Dict[frozenset, int] = {}
        for k, c in enumerate(self.cells):
            mine = []
            for v in c:
                r = c - {v}
                if self._interior(r):
                    mine.append(r)
                    self.ridge_cands[r] = self.ridge_cands.get(r, 0) | (1 << k)
            self.ridges.append(mine)
        self._compat: Dict[int, int] = {}
        self._incidence = incidence_stack(self.cells, self.rows, self.cols)
        self.nodes = 0

    def _interior(self, ridge) -> bool:
        return ({r for r, _ in ridge} == self.row_set and {c for _, c in ridge} == self.col_set)

    def compat(self, k: int) -> int:
        bits = self._compat.get(k)
        if bits is None:
            ok = proper_with_all(self._incidence, k)
            ok[k] = False
            bits = int.from_bytes(np.packbits(ok, bitorder="little").tobytes(), "little")
            self._compat[k] = bits
        return bits

    def roots(self) -> List[Optional[int]]:
        if self.constraints.must_contain:
            return [None]
        a, b = generic_point(self.rows, self.cols)
        supply = dict(zip(self.rows, a))
        demand = dict(zip(self.cols, b))
        return [k for k, c in enumerate(self.cells) if contains_point(c, supply, demand)]

    def run(self, root, limit=None, collect=True):
        """Enumerate solutions below one root branch."""
        all_bits = (1 << len(self.cells)) - 1
        chosen: List[int] = []
        counts: Dict[frozenset, int] = {}
        frontier = set()
        found: List[Triangulation] = []
        total = [0]

        def push(k):
            chosen.append(k)
            for r in self.ridges[k]:
                c = counts.get(r, 0) + 1
                counts[r] = c
                if c == 1:
                    frontier.add(r)
                else:
                    frontier.discard(r)

        def pop():
            k = chosen.pop()
            for r in self.ridges[k]:
                c = counts[r] - 1
                counts[r] = c
                if c == 1:
                    frontier.add(r)
                else:
                    frontier.discard(r)

        alive = all_bits
        start = []
        if root is None:
            for cell in self.constraints.must_contain:
                k = self.index.get(frozenset(cell))
                if k is None:
                    return [], 0
                start.append(k)
        else:
            start.append(root)
        used = 0
        for k in start:
            if not (alive >> k) & 1:
                return [], 0
            alive &= self.compat(k)
            used |= 1 << k
            push(k)

        def dfs(alive, used):
            self.nodes += 1
            if not frontier:
                if len(chosen) == self.target:
                    total[0] += 1
                    if collect:
                        found.append(Triangulation(self.rows, self.cols,
                                                   tuple(self.cells[k] for k in chosen)))
                    return limit is not None and total[0] >= limit
                return False
            best, best_opts, best_n = None, 0, None
            for r in frontier:
                opts = self.ridge_cands.get(r, 0) & alive & ~used
                cnt = bin(opts).count("1")
                if best_n is None or cnt < best_n or (cnt == best_n and cell_key(r) < cell_key(best)):
                    best, best_opts, best_n = r, opts, cnt
                    if cnt == 0:
                        return False
            opts = best_opts
            while opts:
                low = opts & -opts
                k = low.bit_length() - 1
                opts ^= low
                push(k)
                stop = dfs(alive & self.compat(k), used | low)
                pop()
                if stop:
                    return True
            return False

        dfs(alive, used)
        return found, total[0]


def candidate_cells(rows, cols, constraints: Constraints) -> List[Cell]:
    """Spanning trees compatible with every constrained face and position."""
    rows, cols = tuple(sorted(rows)), tuple(sorted(cols))
    table = constraints.face_table(rows, cols)
    _check_consistent(table)
    checks = []
    for f, t in table.items():
        if not (f.rows <= set(rows) and f.cols <= set(cols)):
            raise InputError(f"constrained face {f.label()} is outside the domain")
        checks.append((f.rows, f.cols, t.cells))
    positions = constraints.positions
    if positions is not None:
        if len(positions) != len(rows) or any(v is not None and len(v) != len(cols)
                                              for v in positions):
            raise InputError("position constraint does not match the domain")
    d = len(cols)
    out = []
    for cell in _trees(rows, cols, checks):
        if positions is not None:
            full = [r for r in rows if sum(1 for rr, _ in cell if rr == r) == d]
            if full and len(cell) == len(rows) + d - 1 and d > 1:
                (r,) = full
                want = positions[rows.index(r)]
                if want is None:
                    out.append(cell)
                    continue
                v = [0] * d
                for rr, c in cell:
                    if rr != r:
                        v[cols.index(c)] += 1
                if tuple(v) != tuple(want):
                    continue
        out.append(cell)
    out.sort(key=cell_key)
    return out


def _restriction_ok(part, checks_for_face) -> bool:
    return any(part <= c for c in checks_for_face)


def _trees(rows, cols, checks):
    """Spanning trees built row by row, pruning with the face checks."""
    d = len(cols)
    subsets = []
    for size in range(1, d + 1):
        subsets.extend(combinations(cols, size))
    need = len(rows) + d - 1
    rows_list = list(rows)

    def rec(i, cell, edges):
        if i == len(rows_list):
            if edges == need and is_spanning_tree(cell, rows, cols):
                yield frozenset(cell)
            return
        r = rows_list[i]
        remaining = len(rows_list) - i - 1
        for sub in subsets:
            e = edges + len(sub)
            if e + remaining > need:
                continue
            new = cell + [(r, c) for c in sub]
            if not _partial_ok(new, rows_list[: i + 1], checks):
                continue
            yield from rec(i + 1, new, e)

    yield from rec(0, [], 0)


def _partial_ok(cell, done_rows, checks) -> bool:
    from .grid import is_forest
    if not is_forest(cell):
        return False
    done = set(done_rows)
    for frows, fcols, fcells in checks:
        if not frows <= done:
            continue
        if done_rows[-1] not in frows:
            continue
        part = frozenset(v for v in cell if v[0] in frows and v[1] in fcols)
        if not any(part <= c for c in fcells):
            return False
    return True


def _check_consistent(table: Dict[Face, Triangulation]) -> None:
    faces = list(table)
    for f, g in combinations(faces, 2):
        rows, cols = f.rows & g.rows, f.cols & g.cols
        if not rows or not cols:
            continue
        h = Face(rows, cols)
        if restrict_triangulation(table[f], h) != restrict_triangulation(table[g], h):
            raise InputError(f"constraints clash on face {h.label()} "
                             f"(from {f.label()} and {g.label()})")


# --- entry points ---------------------------------------------------------------

_WORKER: Dict[str, Search] = {}


def _worker_init(rows, cols, constraints, shuffle_seed):
    _WORKER["search"] = Search(rows, cols, constraints, shuffle_seed)


def _worker_run(args):
    root, limit, collect = args
    search = _WORKER["search"]
    before = search.nodes
    found, total = search.run(root, limit, collect)
    return found, total, search.nodes - before


def solve(domain, constraints: Optional[Constraints] = None, mode: str = "decide",
          limit: Optional[int] = None, jobs: int = 1, shuffle_seed=None) -> SolveResult:
    """Search ``domain`` for triangulations under constraints, in the given ``mode``.

    ``domain`` is a shape ``(n, d)``, a :class:`Shape` or a :class:`Face`.
    Enumerations are returned in canonical order regardless of ``jobs`` and
    ``shuffle_seed``.
    """
    if mode not in ("decide", "enumerate", "count"):
        raise InputError(f"unknown mode {mode!r}")
    rows, cols = _domain(domain)
    t0 = time.perf_counter()
    constraints = constraints or Constraints()
    search = Search(rows, cols, constraints, shuffle_seed)
    roots = search.roots()
    eff_limit = 1 if mode == "decide" else limit
    collect = mode != "count"
    found: List[Triangulation] = []
    total = 0
    nodes = 0
    stopped = False
    if jobs > 1 and len(roots) > 1:
        with ProcessPoolExecutor(jobs, initializer=_worker_init,
                                 initargs=(rows, cols, constraints, shuffle_seed)) as pool:
            for part, cnt, nd in pool.map(_worker_run, [(r, eff_limit, collect) for r in roots]):
                found.extend(part)
                total += cnt
                nodes += nd
    else:
        for root in roots:
            part, cnt = search.run(root, None if eff_limit is None else eff_limit - total, collect)
            found.extend(part)
            total += cnt
            if eff_limit is not None and total >= eff_limit:
                stopped = True
                break
        nodes = search.nodes
    if eff_limit is not None and total > eff_limit:
        found = sorted(found, key=_tri_key)[:eff_limit]
        total = eff_limit
    if eff_limit is not None and total >= eff_limit:
        stopped = True
    found.sort(key=_tri_key)
    result = SolveResult(
        satisfiable=total > 0,
        count=total,
        triangulations=found,
        nodes=nodes,
        candidates=len(search.cells),
        wall_time=time.perf_counter() - t0,
        complete=not stopped or mode == "decide",
    )
    log.debug("solve %sx%s mode=%s -> %s (%d nodes)", rows, cols, mode, total, nodes)
    return result


def _tri_key(t: Triangulation):
    return tuple(cell_key(c) for c in t.cells)


def _domain(domain):
    if isinstance(domain, Face):
        return tuple(sorted(domain.rows)), tuple(sorted(domain.cols))
    if isinstance(domain, Triangulation):
        return domain.rows, domain.cols
    shape = as_shape(domain)
    return shape.rows, shape.cols


def count_triangulations(domain, constraints=None, **kw) -> int:
    return solve(domain, constraints, mode="count", **kw).count


def enumerate_triangulations(domain, constraints=None, **kw) -> List[Triangulation]:
    return solve(domain, constraints, mode="enumerate", **kw).triangulations
