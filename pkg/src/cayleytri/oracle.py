"""Exact geometric oracle on the 0/1 vertex coordinates of the product.

Everything here works with integer or ``Fraction`` coordinates and never
with the bipartite-graph shortcuts used elsewhere; it exists to validate them.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .grid import Cell, Vertex, simplex_count


def full_coords(v: Vertex, rows: Sequence[int], cols: Sequence[int]) -> list:
    """``e_row + f_col`` in ``Z^(n+d)``."""
    r, c = v
    return [int(r == x) for x in rows] + [int(c == y) for y in cols]


def affine_coords(v: Vertex, rows: Sequence[int], cols: Sequence[int]) -> list:
    """Lattice-preserving chart of the affine hull: drop the last row and column."""
    r, c = v
    return [int(r == x) for x in rows[:-1]] + [int(c == y) for y in cols[:-1]]


def det(matrix) -> int:
    """Integer determinant by fraction-free Bareiss elimination."""
    m = [list(row) for row in matrix]
    size = len(m)
    if size == 0:
        return 1
    sign, prev = 1, 1
    for k in range(size - 1):
        if m[k][k] == 0:
            for i in range(k + 1, size):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


def normalized_volume(cell: Iterable[Vertex], rows, cols) -> int:
    pts = [affine_coords(v, rows, cols) for v in sorted(cell)]
    if len(pts) != len(rows) + len(cols) - 1:
        return 0
    base = pts[0]
    return abs(det([[a - b for a, b in zip(p, base)] for p in pts[1:]]))


def orientation(points: Sequence[Vertex], p: Vertex, rows, cols) -> int:
    """Sign of ``p`` against the hyperplane spanned by ``points`` (D of them)."""
    pts = [affine_coords(v, rows, cols) for v in points]
    q = affine_coords(p, rows, cols)
    base = pts[0]
    m = [[a - b for a, b in zip(x, base)] for x in pts[1:]]
    m.append([a - b for a, b in zip(q, base)])
    value = det(m)
    return (value > 0) - (value < 0)


def _phase_one_feasible(a_rows: list, b: list) -> bool:
    return feasible_point(a_rows, b) is not None


def feasible_point(a_rows: list, b: list) -> Optional[list]:
    """A point of ``{x >= 0 : A x = b}`` (exact ``Fraction`` entries) or None.

    Integer data only.

    Phase-one simplex with Bland's rule on a fraction-free integer tableau:
    every stored row equals the true row times the common denominator ``den``.
    """
    m = len(a_rows)
    nvar = len(a_rows[0]) if m else 0
    width = nvar + m
    tab = []
    for i in range(m):
        row = list(a_rows[i])
        rhs = b[i]
        if rhs < 0:
            row, rhs = [-x for x in row], -rhs
        tab.append(row + [int(k == i) for k in range(m)] + [rhs])
    basis = [nvar + i for i in range(m)]
    den = 1
    # reduced costs of "minimise the artificial sum", scaled by den
    obj = [-sum(tab[i][j] for i in range(m)) for j in range(width + 1)]
    for i in range(m):
        obj[nvar + i] += 1
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        leave = None
        for i in range(m):
            if tab[i][enter] > 0:
                if leave is None:
                    leave = i
                    continue
                lhs = tab[i][-1] * tab[leave][enter]
                rhs = tab[leave][-1] * tab[i][enter]
                if lhs < rhs or (lhs == rhs and basis[i] < basis[leave]):
                    leave = i
        if leave is None:
            break
        piv = tab[leave][enter]
        prow = tab[leave]
        for i in range(m):
            if i != leave:
                f = tab[i][enter]
                tab[i] = [(x * piv - f * y) // den for x, y in zip(tab[i], prow)]
        f = obj[enter]
        obj = [(x * piv - f * y) // den for x, y in zip(obj, prow)]
        den = piv
        basis[leave] = enter
    if obj[-1] != 0:
        return None
    x = [Fraction(0)] * nvar
    for i, j in enumerate(basis):
        if j < nvar:
            x[j] = Fraction(tab[i][-1], den)
    return x


def has_crossing_circuit(s1: Iterable[Vertex], s2: Iterable[Vertex], rows, cols) -> bool:
    """Is there an affine dependency positive on ``s1`` and negative on ``s2``
    (shared vertices either way) that is not supported on ``s1 & s2`` alone?

    Decided as an exact LP.
    """
    s1, s2 = frozenset(s1), frozenset(s2)
    only1 = sorted(s1 - s2)
    only2 = sorted(s2 - s1)
    both = sorted(s1 & s2)
    if not only1 or not only2:
        return False
    # columns: only1 (+), only2 (as -w), shared (p - q)
    columns, signs = [], []
    for v in only1:
        columns.append(full_coords(v, rows, cols)); signs.append(1)
    for v in only2:
        columns.append(full_coords(v, rows, cols)); signs.append(-1)
    for v in both:
        columns.append(full_coords(v, rows, cols)); signs.append(1)
        columns.append(full_coords(v, rows, cols)); signs.append(-1)
    # the last column coordinate is implied by the others
    dim = len(rows) + len(cols) - 1
    a_rows = [[signs[k] * columns[k][i] for k in range(len(columns))] for i in range(dim)]
    a_rows.append([1] * len(only1) + [0] * (len(columns) - len(only1)))
    b = [0] * dim + [1]
    return _phase_one_feasible(a_rows, b)


def intersect_properly_geometric(s1, s2, rows, cols) -> bool:
    return not has_crossing_circuit(s1, s2, rows, cols)


def find_circuit(s1, s2, rows, cols) -> Optional[tuple]:
    """A smallest crossing circuit ``(positive part, negative part)`` or None.

    Product circuits have unit coefficients, so a split is a circuit iff
    the two coordinate sums agree.
    """
    s1, s2 = frozenset(s1), frozenset(s2)
    union = sorted(s1 | s2)
    for size in range(4, len(union) + 1, 2):
        for support in combinations(union, size):
            for split in range(1 << size):
                plus = frozenset(v for k, v in enumerate(support) if split >> k & 1)
                minus = frozenset(support) - plus
                if len(plus) != len(minus) or not plus <= s1 or not minus <= s2:
                    continue
                if _coord_sum(plus, rows, cols) == _coord_sum(minus, rows, cols):
                    return plus, minus
    return None


def _coord_sum(points, rows, cols) -> list:
    total = [0] * (len(rows) + len(cols))
    for v in points:
        for i, x in enumerate(full_coords(v, rows, cols)):
            total[i] += x
    return total


def barycentric(cell: Iterable[Vertex], point: Sequence[Fraction], rows, cols) -> Optional[list]:
    """Barycentric coordinates of ``point`` (full coordinates) w.r.t. a full simplex."""
    verts = sorted(cell)
    dim = len(rows) + len(cols)
    mat = [[Fraction(full_coords(v, rows, cols)[i]) for v in verts] + [Fraction(point[i])]
           for i in range(dim)]
    k = len(verts)
    r = 0
    pivots = []
    for c in range(k):
        piv = next((i for i in range(r, dim) if mat[i][c] != 0), None)
        if piv is None:
            return None
        mat[r], mat[piv] = mat[piv], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(dim):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    if any(mat[i][-1] != 0 for i in range(r, dim)):
        return None
    return [mat[i][-1] for i in range(k)]


def point_in_simplex(cell, point, rows, cols, strict=False) -> bool:
    lam = barycentric(cell, point, rows, cols)
    if lam is None:
        return False
    return all(x > 0 for x in lam) if strict else all(x >= 0 for x in lam)


def ridge_is_boundary_geometric(ridge: Iterable[Vertex], rows, cols) -> bool:
    """True iff the ridge's hyperplane supports the whole product."""
    ridge = sorted(ridge)
    signs = set()
    for r in rows:
        for c in cols:
            if (r, c) in ridge:
                continue
            s = orientation(ridge, (r, c), rows, cols)
            if s:
                signs.add(s)
    return len(signs) <= 1


def verify_by_volume(cells: Iterable[Cell], rows, cols) -> bool:
    """Exact volume sum equals the product's normalized volume, all cells disjoint."""
    cells = list(cells)
    total = sum(normalized_volume(c, rows, cols) for c in cells)
    if total != simplex_count((len(rows), len(cols))):
        return False
    return all(intersect_properly_geometric(a, b, rows, cols) for a, b in combinations(cells, 2))


def placing_triangulation(rows, cols, order: Optional[Sequence[Vertex]] = None,
                          start: Optional[Iterable[Cell]] = None) -> list:
    """Placing triangulation of all grid vertices.

    ``start`` is an initial full-dimensional list of cells (default: the
    first spanning tree found in ``order``); remaining vertices are placed
    one at a time, coning to the boundary facets they see.
    """
    rows, cols = tuple(sorted(rows)), tuple(sorted(cols))
    order = list(order) if order is not None else [(r, c) for r in rows for c in cols]
    if start is None:
        start = [_first_tree(order, rows, cols)]
    cells = [frozenset(c) for c in start]
    placed = set().union(*cells)
    for p in order:
        if p in placed:
            continue
        cells = place_vertex(cells, p, rows, cols)
        placed.add(p)
    return cells


def place_vertex(cells: list, p: Vertex, rows, cols) -> list:
    counts = {}
    for c in cells:
        for v in c:
            ridge = c - {v}
            counts.setdefault(ridge, []).append((c, v))
    new = list(cells)
    for ridge, owners in counts.items():
        if len(owners) != 1:
            continue
        _, opposite = owners[0]
        pts = sorted(ridge)
        s_p = orientation(pts, p, rows, cols)
        s_o = orientation(pts, opposite, rows, cols)
        if s_p != 0 and s_p == -s_o:
            new.append(ridge | {p})
    return new


def _first_tree(order, rows, cols) -> Cell:
    from .grid import is_forest
    chosen = []
    for v in order:
        if is_forest(chosen + [v]):
            chosen.append(v)
    return frozenset(chosen)


# --- Minkowski cells of n * Delta_{d-1} ---------------------------------------

def _lcm_scale(values) -> list:
    from math import lcm
    den = 1
    for v in values:
        den = lcm(den, Fraction(v).denominator)
    return [int(Fraction(v) * den) for v in values]


def _sum_constraints(summands, d, sign):
    """Columns for convex combinations on each summand; returns (cols, sum rows)."""
    cols = []
    for i, b in enumerate(summands):
        for x in sorted(b):
            cols.append((i, x, sign))
    return cols


def minkowski_cells_meet(p_cell, q_cell, d: int) -> bool:
    """Do the Minkowski sums ``sum P_i`` and ``sum Q_i`` share a point?"""
    return _intersection_point_lp(p_cell, q_cell, d, None, None)


def _intersection_point_lp(p_cell, q_cell, d, w, w_floor):
    n = len(p_cell)
    var = _sum_constraints(p_cell, d, 1) + _sum_constraints(q_cell, d, -1)
    homogeneous = w is not None
    nv = len(var) + (1 if homogeneous else 0)
    rows, rhs = [], []
    for i in range(n):
        for sign in (1, -1):
            row = [int(vi == i and vs == sign) for vi, _, vs in var]
            if homogeneous:
                row.append(-1)
                rhs.append(0)
            else:
                rhs.append(1)
            rows.append(row)
    for x in range(d):
        row = [vs * int(vx == x) for _, vx, vs in var]
        if homogeneous:
            row.append(0)
        rows.append(row)
        rhs.append(0)
    if homogeneous:
        # w(point of P, scaled by s) - s * w_floor = 1
        row = [w[vx] if vs == 1 else 0 for _, vx, vs in var] + [-w_floor]
        rows.append(row)
        rhs.append(1)
    assert all(len(r) == nv for r in rows)
    return feasible_point(rows, rhs) is not None


def face_functional(cell, sub) -> Optional[list]:
    """Integer ``w`` on columns with ``argmin_{cell_i} w == sub_i`` for all i, or None."""
    d = 1 + max(max(b) for b in cell)
    pairs, equal = [], []
    for b, s in zip(cell, sub):
        s = sorted(s)
        for x in s[1:]:
            equal.append((s[0], x))
        for x in s[:1]:
            for y in sorted(set(b) - set(s)):
                pairs.append((x, y))
    # variables: w+ (d), w- (d), slack per strict pair
    nv = 2 * d + len(pairs)
    rows, rhs = [], []
    for k, (x, y) in enumerate(pairs):
        row = [0] * nv
        row[y] += 1; row[x] -= 1; row[d + y] -= 1; row[d + x] += 1
        row[2 * d + k] = -1
        rows.append(row); rhs.append(1)
    for x, y in equal:
        row = [0] * nv
        row[y] += 1; row[x] -= 1; row[d + y] -= 1; row[d + x] += 1
        rows.append(row); rhs.append(0)
    if not rows:
        return [0] * d
    sol = feasible_point(rows, rhs)
    if sol is None:
        return None
    return _lcm_scale([sol[x] - sol[d + x] for x in range(d)])


def labeled_intersection_ok(p_cell, q_cell) -> bool:
    """``sum P_i  &  sum Q_i  ==  sum (P_i & Q_i)`` as point sets (empty if any term is)."""
    d = 1 + max(max(b) for b in list(p_cell) + list(q_cell))
    inter = [set(a) & set(b) for a, b in zip(p_cell, q_cell)]
    if not all(inter):
        return not minkowski_cells_meet(p_cell, q_cell, d)
    w = face_functional(p_cell, inter)
    if w is None:
        return False
    w = w + [0] * (d - len(w))
    floor = sum(w[min(s)] for s in inter)
    return not _intersection_point_lp(p_cell, q_cell, d, w, floor)
