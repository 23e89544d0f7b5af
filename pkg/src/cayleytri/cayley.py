"""Cayley trick: cells of ``Delta_{n-1} x Delta_{d-1}`` as Minkowski cells of ``n Delta_{d-1}``."""

from __future__ import annotations

from itertools import combinations
from typing import FrozenSet, Sequence, Tuple

from .errors import InputError, StructuralError
from .grid import Cell, Triangulation, as_shape, col_index, col_label, is_forest, triangulation_is_valid

MixedCell = Tuple[FrozenSet[int], ...]


def cell_to_minkowski(cell: Cell, shape) -> MixedCell:
    """``B_i`` is the set of columns that row ``i`` uses in the cell."""
    shape = as_shape(shape)
    return tuple(frozenset(c for r, c in cell if r == i) for i in shape.rows)


def is_fine_cell(m: Sequence) -> bool:
    """Dimension additivity of the Minkowski sum <=> the incidence graph is a forest."""
    m = tuple(frozenset(b) for b in m)
    if any(not b for b in m):
        return False
    return is_forest([(i, c) for i, b in enumerate(m, start=1) for c in b])


def is_full_mixed_cell(m: Sequence, d: int) -> bool:
    m = tuple(frozenset(b) for b in m)
    return is_fine_cell(m) and sum(len(b) - 1 for b in m) == d - 1


def minkowski_to_cell(m: Sequence, d: int = None) -> Cell:
    m = tuple(frozenset(b) for b in m)
    if d is None:
        d = 1 + max(max(b) for b in m) if m and all(m) else 0
    if not is_full_mixed_cell(m, d):
        raise StructuralError("mixed cell is not fine and full-dimensional")
    return frozenset((i, c) for i, b in enumerate(m, start=1) for c in b)


def mixed_cell_tokens(m: MixedCell) -> list:
    return ["".join(col_label(c) for c in sorted(b)) for b in m]


def parse_mixed_cell(tokens: Sequence[str]) -> MixedCell:
    return tuple(frozenset(col_index(ch) for ch in tok) for tok in tokens)


def column_summands(cell: Cell) -> dict:
    """The dual reading: for each column, the rows it touches."""
    out = {}
    for r, c in cell:
        out.setdefault(c, set()).add(r)
    return {c: frozenset(rs) for c, rs in out.items()}


def mixed_subdivision(t: Triangulation) -> list:
    return [cell_to_minkowski(c, t.shape) for c in t.cells]


def unmixed_row(cell: Cell, d: int):
    """The row whose summand is the whole simplex, if the cell is unmixed."""
    counts = {}
    for r, _ in cell:
        counts[r] = counts.get(r, 0) + 1
    full = [r for r, k in counts.items() if k == d]
    if len(full) == 1 and all(k == 1 for r, k in counts.items() if r != full[0]):
        return full[0]
    return None


def unmixed_cell_position(cell: Cell, row: int, d: int) -> Tuple[int, ...]:
    """Sum of the vertex summands of the other rows."""
    v = [0] * d
    for r, c in cell:
        if r != row:
            v[c] += 1
    return tuple(v)


def unmixed_positions(t: Triangulation) -> Tuple[Tuple[int, ...], ...]:
    """Positions ``v_1..v_n`` of the unmixed simplices (canonical labels only)."""
    n, d = len(t.rows), len(t.cols)
    if t.rows != tuple(range(1, n + 1)) or t.cols != tuple(range(d)):
        raise InputError("unmixed_positions needs a canonically labelled product")
    if not triangulation_is_valid(t):
        raise StructuralError("not a valid triangulation")
    if n == 1:
        return ((0,) * d,)
    if d == 1:
        # the single cell is every row's unmixed simplex
        return ((n - 1,),) * n
    found = {}
    for cell in t.cells:
        row = unmixed_row(cell, d)
        if row is not None:
            if row in found:
                raise StructuralError(f"two unmixed cells for row {row}")
            found[row] = unmixed_cell_position(cell, row, d)
    if sorted(found) != list(range(1, n + 1)):
        raise StructuralError("missing unmixed cells")
    return tuple(found[i] for i in range(1, n + 1))


def labeled_face_violations(t: Triangulation) -> list:
    """Index pairs of cells whose Minkowski sums meet in more than ``sum(B_i & C_i)``.

    Checked with exact LPs on the Minkowski polytopes themselves.
    """
    from .oracle import labeled_intersection_ok

    cells = mixed_subdivision(t)
    return [(a, b) for a, b in combinations(range(len(cells)), 2)
            if not labeled_intersection_ok(cells[a], cells[b])]
