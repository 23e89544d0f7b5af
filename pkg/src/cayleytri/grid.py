"""Simplices of a product of two simplices, encoded as bipartite graphs.

A vertex of ``Delta_{n-1} x Delta_{d-1}`` is a pair ``(row, col)`` with
``row`` in ``1..n`` and ``col`` in ``0..d-1`` (printed as ``A, B, C, ...``).
A set of vertices is a subgraph of ``K_{n,d}``; it is affinely independent
iff it is a forest, and full-dimensional iff it is a spanning tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Dict, FrozenSet, Iterable, Iterator, Tuple

from .errors import InputError, StructuralError

Vertex = Tuple[int, int]
Cell = FrozenSet[Vertex]

_TOKEN = re.compile(r"^(?:(\d+)([A-Z])|([A-Z])(\d+))$")


def col_label(col: int) -> str:
    return chr(ord("A") + col)


def col_index(label: str) -> int:
    if len(label) != 1 or not "A" <= label <= "Z":
        raise InputError(f"bad column label {label!r}")
    return ord(label) - ord("A")


def vertex_token(v: Vertex) -> str:
    return f"{v[0]}{col_label(v[1])}"


def parse_vertex(token: str) -> Vertex:
    """Parse ``"1A"`` or ``"A1"`` into ``(1, 0)``."""
    m = _TOKEN.match(token.strip())
    if not m:
        raise InputError(f"bad vertex token {token!r}")
    if m.group(1):
        return int(m.group(1)), col_index(m.group(2))
    return int(m.group(4)), col_index(m.group(3))


def make_cell(tokens: Iterable) -> Cell:
    """Build a cell from tokens (``"1A"``) or ``(row, col)`` pairs."""
    out = set()
    for t in tokens:
        out.add(parse_vertex(t) if isinstance(t, str) else (int(t[0]), int(t[1])))
    if not out:
        raise InputError("empty cell")
    return frozenset(out)


def parse_cells(text: str) -> list:
    """Parse whitespace-separated groups like ``"A1 A3 B3, C3 D1 D2"``.

    Cells are separated by ``;`` or ``|``; tokens by spaces or commas.
    """
    return [make_cell(re.split(r"[\s,]+", part.strip())) for part in re.split(r"[;|]", text)
            if part.strip()]


def cell_key(cell: Iterable[Vertex]) -> tuple:
    return tuple(sorted(cell))


def cell_tokens(cell: Iterable[Vertex]) -> list:
    return [vertex_token(v) for v in cell_key(cell)]


@dataclass(frozen=True)
class Shape:
    n: int
    d: int

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise InputError(f"shape must have n, d >= 1, got ({self.n}, {self.d})")

    @property
    def rows(self) -> tuple:
        return tuple(range(1, self.n + 1))

    @property
    def cols(self) -> tuple:
        return tuple(range(self.d))

    @property
    def dim(self) -> int:
        return self.n + self.d - 2

    def __iter__(self):
        yield self.n
        yield self.d


def as_shape(shape) -> Shape:
    return shape if isinstance(shape, Shape) else Shape(*shape)


@dataclass(frozen=True)
class Face:
    """The product face ``Delta_rows x Delta_cols``."""

    rows: FrozenSet[int]
    cols: FrozenSet[int]

    def __post_init__(self):
        object.__setattr__(self, "rows", frozenset(self.rows))
        object.__setattr__(self, "cols", frozenset(self.cols))
        if not self.rows or not self.cols:
            raise InputError("a face needs at least one row and one column")

    @classmethod
    def full(cls, shape) -> "Face":
        shape = as_shape(shape)
        return cls(shape.rows, shape.cols)

    @property
    def dim(self) -> int:
        return len(self.rows) + len(self.cols) - 2

    @property
    def shape(self) -> Shape:
        return Shape(len(self.rows), len(self.cols))

    def vertices(self) -> Cell:
        return frozenset((r, c) for r in self.rows for c in self.cols)

    def contains_face(self, other: "Face") -> bool:
        return other.rows <= self.rows and other.cols <= self.cols

    def key(self) -> tuple:
        return (self.dim, tuple(sorted(self.rows)), tuple(sorted(self.cols)))

    def label(self) -> str:
        return "".join(map(str, sorted(self.rows))) + "x" + "".join(
            col_label(c) for c in sorted(self.cols))


@dataclass(frozen=True)
class Triangulation:
    """A set of full simplices of the face ``rows x cols``, canonically ordered.

    Construction does not validate; use :func:`is_triangulation`.
    """

    rows: Tuple[int, ...]
    cols: Tuple[int, ...]
    cells: Tuple[Cell, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(sorted(self.rows)))
        object.__setattr__(self, "cols", tuple(sorted(self.cols)))
        cells = {frozenset(c) for c in self.cells}
        object.__setattr__(self, "cells", tuple(sorted(cells, key=cell_key)))

    @classmethod
    def of_shape(cls, shape, cells) -> "Triangulation":
        shape = as_shape(shape)
        return cls(shape.rows, shape.cols, tuple(cells))

    @property
    def shape(self) -> Shape:
        return Shape(len(self.rows), len(self.cols))

    @cached_property
    def face(self) -> Face:
        return Face(self.rows, self.cols)

    def transpose(self) -> "Triangulation":
        """Swap the roles of rows and columns (row ``i`` <-> column ``i-1``)."""
        return Triangulation(
            tuple(c + 1 for c in self.cols),
            tuple(r - 1 for r in self.rows),
            tuple(frozenset((c + 1, r - 1) for r, c in cell) for cell in self.cells),
        )

    def to_tokens(self) -> list:
        return [cell_tokens(c) for c in self.cells]

    def __len__(self):
        return len(self.cells)


def _check_bounds(cell, rows, cols):
    rows, cols = set(rows), set(cols)
    for r, c in cell:
        if r not in rows or c not in cols:
            raise InputError(f"vertex {vertex_token((r, c))} outside the grid")


def is_spanning_tree(cell: Iterable[Vertex], rows, cols) -> bool:
    cell = set(cell)
    rows, cols = set(rows), set(cols)
    if len(cell) != len(rows) + len(cols) - 1:
        return False
    if {r for r, _ in cell} != rows or {c for _, c in cell} != cols:
        return False
    # union-find over row nodes ("r", i) and column nodes ("c", X)
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r, c in cell:
        a, b = find(("r", r)), find(("c", c))
        if a == b:
            return False
        parent[a] = b
    return True


def is_full_simplex(cell: Iterable[Vertex], shape) -> bool:
    shape = as_shape(shape)
    cell = frozenset(cell)
    _check_bounds(cell, shape.rows, shape.cols)
    return is_spanning_tree(cell, shape.rows, shape.cols)


def is_forest(cell: Iterable[Vertex]) -> bool:
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r, c in cell:
        a, b = find(("r", r)), find(("c", c))
        if a == b:
            return False
        parent[a] = b
    return True


def simplex_count(shape) -> int:
    """Number of maximal cells of every triangulation (all are unimodular)."""
    n, d = as_shape(shape)
    return comb(n + d - 2, n - 1)


def _alternating_cycle(s1: Cell, s2: Cell) -> bool:
    # Directed graph: row -> col along s1 edges, col -> row along s2 edges
    # (shared edges both ways). A simple cycle of length >= 4 is a circuit with
    # its positive part in s1 and its negative part in s2. Shared edges form a
    # forest, so such a cycle exists iff some unshared edge closes a cycle,
    # i.e. its head reaches its tail.
    succ: Dict[tuple, list] = {}
    for r, c in s1:
        succ.setdefault((0, r), []).append((1, c))
    for r, c in s2:
        succ.setdefault((1, c), []).append((0, r))
    for r, c in s1 ^ s2:
        head, tail = ((1, c), (0, r)) if (r, c) in s1 else ((0, r), (1, c))
        seen = {head}
        stack = [head]
        while stack:
            for nxt in succ.get(stack.pop(), ()):
                if nxt == tail:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return False


def intersect_properly(s1: Iterable[Vertex], s2: Iterable[Vertex]) -> bool:
    """True iff ``conv(s1) & conv(s2) == conv(s1 & s2)``.

    Decided combinatorially: the simplices clash iff some simple cycle of
    ``K_{n,d}`` alternates between edges of ``s1`` and edges of ``s2``.
    """
    s1, s2 = frozenset(s1), frozenset(s2)
    if s1 == s2:
        return True
    return not _alternating_cycle(s1, s2)


def restrict_cell(cell: Cell, face: Face) -> Cell:
    return frozenset(v for v in cell if v[0] in face.rows and v[1] in face.cols)


def restrict_triangulation(t: Triangulation, face: Face) -> Triangulation:
    """The triangulation that ``t`` induces on a face of its support."""
    if not (face.rows <= set(t.rows) and face.cols <= set(t.cols)):
        raise InputError(f"face {face.label()} is not a face of the triangulated product")
    cells = set()
    for c in t.cells:
        r = restrict_cell(c, face)
        if is_spanning_tree(r, face.rows, face.cols):
            cells.add(r)
    return Triangulation(tuple(face.rows), tuple(face.cols), tuple(cells))


def is_triangulation(cells: Iterable[Cell], shape=None, *, rows=None, cols=None) -> bool:
    """Pairwise proper intersection plus the exact cell count.

    Equal (unit) volumes make the count sufficient for covering.
    """
    if shape is not None:
        shape = as_shape(shape)
        rows, cols = shape.rows, shape.cols
    cells = list({frozenset(c) for c in cells})
    if len(cells) != comb(len(rows) + len(cols) - 2, len(rows) - 1):
        return False
    if not all(is_spanning_tree(c, rows, cols) for c in cells):
        return False
    return all(intersect_properly(a, b) for a, b in combinations(cells, 2))


def triangulation_is_valid(t: Triangulation) -> bool:
    return is_triangulation(t.cells, rows=t.rows, cols=t.cols)


def require_valid(t: Triangulation) -> None:
    if not triangulation_is_valid(t):
        raise StructuralError("not a valid triangulation")


def spanning_trees(rows, cols) -> Iterator[Cell]:
    """All spanning trees of ``K_{rows,cols}`` in canonical order."""
    rows, cols = tuple(sorted(rows)), tuple(sorted(cols))
    grid = [(r, c) for r in rows for c in cols]
    k = len(rows) + len(cols) - 1
    for combo in combinations(grid, k):
        if is_spanning_tree(combo, rows, cols):
            yield frozenset(combo)


def spanning_tree_count(n: int, d: int) -> int:
    """``n^(d-1) * d^(n-1)``, the number of spanning trees of ``K_{n,d}``."""
    return n ** (d - 1) * d ** (n - 1)


def relabel(cell: Cell, row_map=None, col_map=None) -> Cell:
    row_map = row_map or {}
    col_map = col_map or {}
    return frozenset((row_map.get(r, r), col_map.get(c, c)) for r, c in cell)
