from itertools import combinations

import pytest

from cayleytri.grid import intersect_properly, make_cell, spanning_trees
from cayleytri.oracle import (
    find_circuit,
    intersect_properly_geometric,
    normalized_volume,
    placing_triangulation,
    verify_by_volume,
)
from cayleytri.grid import is_triangulation


def test_square_circuit():
    s1, s2 = make_cell("1A 1B 2B".split()), make_cell("1A 1B 2A".split())
    pos, neg = find_circuit(s1, s2, (1, 2), (0, 1))
    assert {pos, neg} == {make_cell(["1A", "2B"]), make_cell(["1B", "2A"])}


def test_every_tree_is_unimodular():
    rows, cols = (1, 2, 3), (0, 1, 2, 3)
    assert {normalized_volume(t, rows, cols) for t in spanning_trees(rows, cols)} == {1}


@pytest.mark.parametrize("shape", [(3, 3)])
def test_combinatorial_and_geometric_intersection_agree(shape):
    rows, cols = tuple(range(1, shape[0] + 1)), tuple(range(shape[1]))
    trees = list(spanning_trees(rows, cols))
    bad = [(a, b) for a, b in combinations(trees, 2)
           if intersect_properly(a, b) != intersect_properly_geometric(a, b, rows, cols)]
    assert bad == []


def test_placing_gives_triangulation():
    cells = placing_triangulation((1, 2, 3), (0, 1, 2, 3))
    assert len(cells) == 10
    assert is_triangulation(cells, (3, 4))
    assert verify_by_volume(cells, (1, 2, 3), (0, 1, 2, 3))


def test_volume_check_rejects_short_sets():
    cells = placing_triangulation((1, 2), (0, 1, 2))
    assert not verify_by_volume(cells[:-1], (1, 2), (0, 1, 2))
