"""Systems of permutations written along the edges of a complete graph.

A system of permutations of ``[n]`` on the columns ``0..d-1`` stores, for
every column pair ``X < Y``, the ordering of the row symbols read from
``X`` towards ``Y``. Reading from ``Y`` gives the reversed ordering.

The dual of a system of shape ``(n, d)`` is again a :class:`PermutationSystem`,
of shape ``(d, n)``: its symbols ``1..d`` stand for the columns ``A, B, ...``
and its "columns" ``0..n-1`` stand for the rows ``1..n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .errors import CyclicSystemError, InputError, StructuralError
from .grid import Shape, Triangulation, col_index, col_label, restrict_triangulation, Face

Perm = Tuple[int, ...]
Edge = Tuple[int, int]


def parse_perm(text) -> Perm:
    """``"4213"`` or ``[4, 2, 1, 3]`` -> ``(4, 2, 1, 3)``."""
    if isinstance(text, str):
        text = text.strip()
        if any(ch in text for ch in ", "):
            return tuple(int(x) for x in text.replace(",", " ").split())
        return tuple(int(ch) for ch in text)
    return tuple(int(x) for x in text)


def perm_str(perm: Sequence[int]) -> str:
    if all(x < 10 for x in perm):
        return "".join(map(str, perm))
    return ",".join(map(str, perm))


@dataclass(frozen=True)
class PermutationSystem:
    n: int
    d: int
    perms: Tuple[Tuple[Edge, Perm], ...]

    def __post_init__(self):
        table = dict(self.perms)
        expected = set(combinations(range(self.d), 2))
        if set(table) != expected:
            raise InputError("a system needs exactly one permutation per column pair")
        symbols = set(range(1, self.n + 1))
        for edge, perm in table.items():
            if len(perm) != self.n or set(perm) != symbols:
                raise InputError(f"edge {self.edge_label(edge)}: {perm} is not a permutation of [{self.n}]")
        object.__setattr__(self, "perms", tuple(sorted((e, tuple(p)) for e, p in table.items())))

    @classmethod
    def from_dict(cls, n: int, d: int, perms: Dict) -> "PermutationSystem":
        """Keys are ``"AB"``-style labels or ``(X, Y)`` pairs, in either order."""
        table = {}
        for key, perm in perms.items():
            x, y = (col_index(key[0]), col_index(key[1])) if isinstance(key, str) else key
            perm = parse_perm(perm)
            if x > y:
                x, y, perm = y, x, perm[::-1]
            table[(x, y)] = perm
        return cls(n, d, tuple(table.items()))

    @property
    def shape(self) -> Shape:
        return Shape(self.n, self.d)

    @staticmethod
    def edge_label(edge: Edge) -> str:
        return col_label(edge[0]) + col_label(edge[1])

    def read(self, x: int, y: int) -> Perm:
        """The permutation read from column ``x`` towards column ``y``."""
        if x == y:
            raise InputError("an edge needs two distinct columns")
        if x < y:
            return dict(self.perms)[(x, y)]
        return dict(self.perms)[(y, x)][::-1]

    def to_dict(self) -> dict:
        return {self.edge_label(e): list(p) for e, p in self.perms}

    def reversed_readings(self) -> dict:
        """Every permutation read from the larger column (for covariance checks)."""
        return {(y, x): p[::-1] for (x, y), p in self.perms}

    def sub_system(self, cols: Sequence[int]) -> "PermutationSystem":
        """Restriction to a subset of columns, relabelled ``0..k-1``."""
        cols = sorted(cols)
        table = {(a, b): self.read(cols[a], cols[b]) for a, b in combinations(range(len(cols)), 2)}
        return PermutationSystem(self.n, len(cols), tuple(table.items()))


def _precedes(perm: Perm, i: int, j: int) -> bool:
    return perm.index(i) < perm.index(j)


def tournament(s: PermutationSystem, i: int, j: int) -> Dict[Edge, bool]:
    """For each column pair ``X < Y``: True iff the edge points ``X -> Y`` for ``(i, j)``."""
    return {e: _precedes(p, i, j) for e, p in s.perms}


def find_cyclic_triple(s: PermutationSystem) -> Optional[tuple]:
    """First ``(i, j, (X, Y, Z))`` with a directed triangle, or None."""
    table = dict(s.perms)
    for x, y, z in combinations(range(s.d), 3):
        pxy, pyz, pxz = table[(x, y)], table[(y, z)], table[(x, z)]
        for i, j in combinations(range(1, s.n + 1), 2):
            a = _precedes(pxy, i, j)
            b = _precedes(pyz, i, j)
            c = _precedes(pxz, i, j)
            # X->Y->Z->X or the reverse
            if a == b and c != a:
                return (i, j, (col_label(x), col_label(y), col_label(z)))
    return None


def is_acyclic(s: PermutationSystem) -> bool:
    """Acyclic iff acyclic on every column triangle."""
    return find_cyclic_triple(s) is None


def topological_order(s: PermutationSystem, i: int, j: int) -> Tuple[int, ...]:
    """Columns ordered source-first by the ``(i -> j)`` tournament."""
    outdeg = [0] * s.d
    for (x, y), forward in tournament(s, i, j).items():
        outdeg[x if forward else y] += 1
    order = sorted(range(s.d), key=lambda c: -outdeg[c])
    if sorted(outdeg) != list(range(s.d)):
        raise CyclicSystemError(find_cyclic_triple(s) or (i, j, ()))
    return tuple(order)


def source(s: PermutationSystem, i: int, j: int) -> int:
    return topological_order(s, i, j)[0]


def dual_system(s: PermutationSystem) -> PermutationSystem:
    """The system of column orderings along the row pairs (shape ``(d, n)``)."""
    triple = find_cyclic_triple(s)
    if triple is not None:
        raise CyclicSystemError(triple)
    table = {}
    for i, j in combinations(range(1, s.n + 1), 2):
        table[(i - 1, j - 1)] = tuple(c + 1 for c in topological_order(s, i, j))
    return PermutationSystem(s.d, s.n, tuple(table.items()))


def dual_label(perm: Perm) -> str:
    """Render a dual permutation (symbols ``1..d``) as column letters."""
    return "".join(col_label(k - 1) for k in perm)


def dual_table(s: PermutationSystem) -> Dict[str, str]:
    """Dual orderings keyed by row pair: ``{"12": "CAB", ...}``."""
    sep = "" if s.n < 10 else ","
    return {f"{i + 1}{sep}{j + 1}": dual_label(p) for (i, j), p in dual_system(s).perms}


def positions_from_system(s: PermutationSystem) -> Tuple[Tuple[int, ...], ...]:
    """Coordinate ``X`` of ``v_i`` counts the ``j`` whose ``(i -> j)`` source is ``X``."""
    triple = find_cyclic_triple(s)
    if triple is not None:
        raise CyclicSystemError(triple)
    out = []
    for i in range(1, s.n + 1):
        v = [0] * s.d
        for j in range(1, s.n + 1):
            if j != i:
                v[source(s, i, j)] += 1
        out.append(tuple(v))
    return tuple(out)


def delete_symbols(s: PermutationSystem, kill: Iterable[int]):
    """Remove symbols; returns ``(system, mapping)`` with ``mapping[old] = new``."""
    kill = set(kill)
    keep = [i for i in range(1, s.n + 1) if i not in kill]
    if not keep:
        raise InputError("cannot delete every symbol")
    if not kill <= set(range(1, s.n + 1)):
        raise InputError(f"unknown symbols {sorted(kill - set(range(1, s.n + 1)))}")
    mapping = {old: new for new, old in enumerate(keep, start=1)}
    table = {e: tuple(mapping[x] for x in p if x in mapping) for e, p in s.perms}
    return PermutationSystem(len(keep), s.d, tuple(table.items())), mapping


def delete_from_perm(perm: Sequence[int], kill: Iterable[int]) -> Perm:
    kill = set(kill)
    return tuple(x for x in perm if x not in kill)


# --- prisms -----------------------------------------------------------------

def staircase(sigma: Sequence[int], x: int, y: int) -> Triangulation:
    """Triangulation of ``rows(sigma) x {x, y}`` encoded by ``sigma`` read from ``x``.

    ``sigma`` lists the zones met when walking the edge from ``x`` to ``y``:
    cell ``k`` has ``sigma[k]`` on both columns, the rows before it on ``y``
    and the rows after it on ``x``. So for ``i`` before ``j`` the square
    ``{i, j} x {x, y}`` gets the diagonal ``(x, j)-(y, i)``.
    """
    sigma = tuple(sigma)
    if len(set(sigma)) != len(sigma) or not sigma:
        raise InputError(f"{sigma} is not a permutation")
    if x == y:
        raise InputError("staircase needs two distinct columns")
    cells = []
    for k in range(len(sigma)):
        cells.append(frozenset([(r, x) for r in sigma[k:]] + [(r, y) for r in sigma[:k + 1]]))
    return Triangulation(tuple(sigma), (x, y), tuple(cells))


def extract_permutation(t: Triangulation, from_col: int) -> Perm:
    """Inverse of :func:`staircase`: read the prism triangulation from ``from_col``."""
    if len(t.cols) != 2 or from_col not in t.cols:
        raise StructuralError("extract_permutation needs a prism over an edge containing from_col")
    n = len(t.rows)
    if len(t.cells) != n:
        raise StructuralError("wrong number of cells for a prism")
    other = t.cols[1] if t.cols[0] == from_col else t.cols[0]
    sigma = [None] * n
    for cell in t.cells:
        # the k-th zone from from_col leaves n - k rows on from_col
        k = n + 1 - sum(1 for _, c in cell if c == from_col)
        both = [r for r, c in cell if c == from_col and (r, other) in cell]
        if len(both) != 1 or not 1 <= k <= n or sigma[k - 1] is not None:
            raise StructuralError("not a staircase triangulation")
        sigma[k - 1] = both[0]
    if staircase(sigma, from_col, other) != t:
        raise StructuralError("not a valid prism triangulation")
    return tuple(sigma)


def system_from_triangulation(t: Triangulation) -> PermutationSystem:
    if t.rows != tuple(range(1, len(t.rows) + 1)) or t.cols != tuple(range(len(t.cols))):
        raise InputError("system_from_triangulation needs a canonically labelled product")
    table = {}
    for x, y in combinations(t.cols, 2):
        prism = restrict_triangulation(t, Face(t.rows, (x, y)))
        table[(x, y)] = extract_permutation(prism, x)
    return PermutationSystem(len(t.rows), len(t.cols), tuple(table.items()))


# --- positions --------------------------------------------------------------

def check_positions(u: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], ...]:
    u = tuple(tuple(int(x) for x in v) for v in u)
    if not u:
        raise InputError("empty position system")
    n = len(u)
    d = len(u[0])
    for v in u:
        if len(v) != d:
            raise InputError("position vectors of different lengths")
        if any(x < 0 for x in v):
            raise InputError(f"negative coordinate in {v}")
        if sum(v) != n - 1:
            raise InputError(f"{v} does not sum to n-1 = {n - 1}")
    return u


def is_spread_out(u: Sequence[Sequence[int]]) -> bool:
    """Every k of the vectors have coordinatewise minima summing to at most n-k."""
    u = check_positions(u)
    n, d = len(u), len(u[0])
    for k in range(1, n + 1):
        for subset in combinations(u, k):
            if sum(min(v[x] for v in subset) for x in range(d)) > n - k:
                return False
    return True


def classify_coordinates(u: Sequence[Sequence[int]]) -> Tuple[str, ...]:
    """Per coordinate: ``"i-spread"``, ``"i-null"`` or ``"neither"``."""
    u = check_positions(u)
    n, d = len(u), len(u[0])
    tags = []
    for x in range(d):
        values = [v[x] for v in u]
        if all(val == 0 for val in values):
            tags.append("i-null")
        elif sorted(values) == list(range(n)):
            tags.append("i-spread")
        else:
            tags.append("neither")
    return tuple(tags)
