from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from cayleytri.errors import InputError
from cayleytri.grid import (
    Face,
    Triangulation,
    cell_tokens,
    col_index,
    col_label,
    intersect_properly,
    is_full_simplex,
    is_spanning_tree,
    is_triangulation,
    make_cell,
    parse_vertex,
    restrict_triangulation,
    simplex_count,
    spanning_tree_count,
    spanning_trees,
)
from cayleytri.perms import staircase


def cell(text):
    return make_cell(text.split())


def test_vertex_tokens_both_orders():
    assert parse_vertex("1A") == parse_vertex("A1") == (1, 0)
    assert parse_vertex("12C") == (12, 2)
    assert col_label(col_index("D")) == "D"
    with pytest.raises(InputError):
        parse_vertex("a1")


def test_cell_tokens_sorted_row_major():
    assert cell_tokens(cell("B2 A1 B1")) == ["1A", "1B", "2B"]


@pytest.mark.parametrize("text,expected", [
    ("1A 1B 2B", True),
    ("1A 1B 2A 2B", False),
    ("1A 1B", False),
])
def test_spanning_tree_square(text, expected):
    assert is_spanning_tree(cell(text), (1, 2), (0, 1)) is expected


def test_spanning_tree_labelled_cell():
    assert is_full_simplex(cell("A1 A3 B3 C3 D1 D2"), (3, 4))


def test_proper_intersection_square():
    assert intersect_properly(cell("1A 1B 2B"), cell("1A 2A 2B"))
    assert not intersect_properly(cell("1A 1B 2B"), cell("1A 1B 2A"))


def test_proper_intersection_labelled_pair():
    assert not intersect_properly(cell("A1 A3 B3 C3 D1 D2"), cell("A1 D1 B2 D2 A3 C3"))


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (3, 4), (5, 4), (1, 6)])
def test_simplex_count(n, d):
    assert simplex_count((n, d)) == comb(n + d - 2, n - 1)


@pytest.mark.parametrize("n,d", [(1, 1), (2, 2), (2, 3), (3, 3), (3, 4)])
def test_spanning_tree_enumeration_matches_formula(n, d):
    trees = list(spanning_trees(range(1, n + 1), range(d)))
    assert len(trees) == len(set(trees)) == spanning_tree_count(n, d) == n ** (d - 1) * d ** (n - 1)


def test_square_triangulations():
    assert is_triangulation([cell("1A 1B 2B"), cell("1A 2A 2B")], (2, 2))
    assert not is_triangulation([cell("1A 1B 2B"), cell("1A 1B 2A")], (2, 2))
    assert not is_triangulation([cell("1A 1B 2B")], (2, 2))


def test_restriction_of_staircase_drops_symbol():
    t = staircase((1, 2, 3), 0, 1)
    r = restrict_triangulation(t, Face((1, 2), (0, 1)))
    assert r == staircase((1, 2), 0, 1)


def test_restriction_to_whole_face_is_identity():
    t = staircase((3, 1, 2), 0, 1)
    assert restrict_triangulation(t, t.face) == t


def test_transpose_round_trip():
    t = staircase((2, 3, 1), 0, 1)
    assert t.transpose().transpose() == t
    assert is_triangulation(t.transpose().cells, rows=(1, 2), cols=(0, 1, 2))


def test_face_validation():
    with pytest.raises(InputError):
        Face((), (0,))
    assert Face((1, 2), (0, 1, 2)).dim == 3


@settings(max_examples=40, deadline=None)
@given(st.permutations([1, 2, 3, 4]))
def test_staircases_are_triangulations(perm):
    t = staircase(perm, 0, 1)
    assert is_triangulation(t.cells, (4, 2))
    assert isinstance(t, Triangulation)
