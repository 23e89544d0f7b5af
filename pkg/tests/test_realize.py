import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from cayleytri.cayley import unmixed_positions
from cayleytri.errors import InputError
from cayleytri.grid import Face, Triangulation, is_triangulation, make_cell, restrict_triangulation
from cayleytri.perms import is_spread_out, staircase
from cayleytri.realize import (
    DROP,
    STRIP,
    drop_null_coordinate,
    glue_and_cone,
    inull_lift,
    is_reducible,
    minimal_counterexample_screen,
    realize_positions,
    reduce,
    reduce_positive_coordinate,
)
from cayleytri.solver import Constraints, solve

from conftest import U, U1, U2


def test_strip_c_then_b():
    u1, step = reduce_positive_coordinate(U, 2)
    assert u1 == U1 and step.to_dict()["removed"] == 5
    u2, _ = reduce_positive_coordinate(u1, 1)
    assert u2 == U2


def test_drop_null():
    core, step = drop_null_coordinate(U2)
    assert core == ((0, 2, 0), (2, 0, 0), (0, 0, 2)) and step.coordinate == 2
    assert drop_null_coordinate(U) is None


def test_strip_two_by_two():
    small, step = reduce_positive_coordinate(((1, 0), (0, 1)), 0)
    assert small == ((0, 0),) and step.vector == (0, 1)


def test_greedy_reduction_records_steps():
    core, steps = reduce(U)
    assert [s.kind for s in steps][:2] == [STRIP, STRIP]
    assert steps[-1].after == core
    assert all(is_spread_out(s.after) for s in steps)


def test_planned_reduction():
    _, steps = reduce(U, [(STRIP, 2), (STRIP, 1), (DROP, 2)])
    assert [s.after for s in steps[:2]] == [U1, U2]


def _random_null_system(rng, n, d, i):
    vecs = [v for v in product(range(n), repeat=d - 1) if sum(v) == n - 1]
    core = [rng.choice(vecs) for _ in range(n)]
    return tuple(v[:i] + (0,) + v[i:] for v in core), tuple(core)


def test_null_coordinate_preserves_spread_out():
    rng = random.Random(11)
    for _ in range(200):
        n, d = rng.randint(2, 5), rng.randint(2, 4)
        i = rng.randrange(d)
        u, core = _random_null_system(rng, n, d, i)
        assert is_spread_out(u) == is_spread_out(core)


def test_glue_square():
    t1 = Triangulation((1,), (0, 1), (make_cell(["1A", "1B"]),))
    t2 = Triangulation((1, 2), (0,), (make_cell(["1A", "2A"]),))
    assert glue_and_cone(t1, t2) == staircase((2, 1), 0, 1)


def test_glue_rejects_disagreement():
    square = staircase((1, 2), 0, 1)
    t1 = solve(Face((1, 2), (0, 1, 2)), Constraints(faces={square.face: square}),
               mode="enumerate").triangulations[0]
    t2 = staircase((3, 2, 1), 0, 1)  # restricts to the other diagonal on rows 1, 2
    with pytest.raises(InputError, match="12xAB"):
        glue_and_cone(t1, t2)
    with pytest.raises(InputError):
        glue_and_cone(square, square)


@pytest.mark.parametrize("perm", [(1, 2, 3), (2, 3, 1), (3, 1, 2)])
def test_lift_staircase_gains_zero(perm):
    t = staircase(perm, 0, 1)
    lifted, _ = inull_lift(t, 2)
    assert is_triangulation(lifted.cells, (3, 3))
    assert unmixed_positions(lifted) == tuple(v + (0,) for v in unmixed_positions(t))
    assert restrict_triangulation(lifted, Face(t.rows, (0, 1))) == t


def test_lift_then_restrict_random():
    rng = random.Random(5)
    for _ in range(6):
        shape = rng.choice([(3, 3), (4, 2), (2, 3)])
        ts = solve(shape, mode="enumerate").triangulations
        t = rng.choice(ts)
        i = rng.randrange(shape[1] + 1)
        lifted, _ = inull_lift(t, i)
        got = unmixed_positions(lifted)
        assert tuple(v[:i] + v[i + 1:] for v in got) == unmixed_positions(t)
        assert all(v[i] == 0 for v in got)


def test_realize_u():
    r = realize_positions(U)
    assert r.realizable
    assert unmixed_positions(r.triangulation) == U


def test_realize_core_counts():
    assert realize_positions(U2, count=True).count == 20
    assert realize_positions(((0, 2, 0), (2, 0, 0), (0, 0, 2)), count=True).count == 2


def test_refuses_non_spread_out():
    r = realize_positions(((0, 1), (0, 1)))
    assert not r.spread_out and r.to_dict()["verdict"] == "NOT-SPREAD-OUT"


def test_i_spread_systems_realizable():
    for n, d in [(3, 3), (4, 3)]:
        vecs = [v for v in product(range(n), repeat=d) if sum(v) == n - 1]
        seen = 0
        for combo in product(vecs, repeat=n):
            if combo != tuple(sorted(combo)):
                continue
            if any(sorted(v[c] for v in combo) == list(range(n)) for c in range(d)):
                seen += 1
                assert is_spread_out(combo)
                assert realize_positions(combo).realizable
        assert seen > 0


def test_screen():
    assert minimal_counterexample_screen(U) is False
    assert minimal_counterexample_screen(U2) is False
    assert is_reducible(U)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_screen_agrees_with_reductions(data):
    n, d = data.draw(st.integers(2, 4)), data.draw(st.integers(2, 4))
    vecs = [v for v in product(range(n), repeat=d) if sum(v) == n - 1]
    u = tuple(data.draw(st.sampled_from(vecs)) for _ in range(n))
    if not is_spread_out(u):
        return
    direct = drop_null_coordinate(u) is not None or reduce_positive_coordinate(u) is not None
    assert is_reducible(u) == direct
