import pytest

from cayleytri.errors import CyclicSystemError
from cayleytri.perms import PermutationSystem, is_acyclic, system_from_triangulation
from cayleytri.pipelines import all_systems, cyclic_prism, level1_skeleton
from cayleytri.skeleton import (
    boundary_completions,
    boundary_of,
    coherence_violations,
    count_boundary_completions,
    extend_skeleton,
    faces_of,
    facet_table,
    lemma1_flags,
    restrict_to_skeleton,
    skeleton_from_system,
)
from cayleytri.solver import enumerate_triangulations


def test_restrict_top_level_is_identity(example_triangulation):
    sk = restrict_to_skeleton(example_triangulation, example_triangulation.face.dim)
    assert sk.assignment[example_triangulation.face] == example_triangulation


def test_edges_trivial():
    t = enumerate_triangulations((3, 3))[0]
    sk = restrict_to_skeleton(t, 1)
    assert all(len(x.cells) == 1 for x in sk.assignment.values())


def test_boundary_of_full_triangulation_is_coherent():
    for t in enumerate_triangulations((3, 4))[::50]:
        assert coherence_violations(boundary_of(t)) == []


def test_example_system_skeleton(example_system):
    sk = skeleton_from_system(example_system)
    edges = [f for f in sk.assignment if len(f.rows) == 4 and len(f.cols) == 2]
    assert len(edges) == 3


def test_dual_assignment_needs_acyclic():
    cyc = PermutationSystem.from_dict(2, 3, {"AB": "12", "BC": "12", "AC": "21"})
    with pytest.raises(CyclicSystemError):
        skeleton_from_system(cyc, with_dual=True)


def test_acyclic_systems_coherent_with_dual_at_34():
    for s in all_systems(3, 4):
        if is_acyclic(s):
            assert coherence_violations(skeleton_from_system(s, with_dual=True)) == []


def test_level_one_to_two():
    for shape in [(2, 2), (3, 3), (3, 4)]:
        assert extend_skeleton(level1_skeleton(shape), 2).ok


def test_cyclic_prism_does_not_extend():
    res = extend_skeleton(cyclic_prism(), 3)
    assert not res.ok and res.witness.dim == 3


def test_boundary_completion_counts(s31_system):
    assert count_boundary_completions(s31_system)[0] == 4
    assert count_boundary_completions(PermutationSystem.from_dict(2, 2, {"AB": "12"}))[0] == 1


def test_full_boundaries_among_completions():
    groups = {}
    for t in enumerate_triangulations((3, 3)):
        groups.setdefault(system_from_triangulation(t), []).append(t)
    for s, ts in list(groups.items())[::7]:
        keys = {tuple(sorted((f.key(), x.cells) for f, x in facet_table(b).items()))
                for b in boundary_completions(s)}
        for t in ts:
            own = tuple(sorted((f.key(), x.cells) for f, x in facet_table(boundary_of(t)).items()))
            assert own in keys


def test_lemma1_flags_agree_at_33():
    for s in all_systems(3, 3):
        assert len(set(lemma1_flags(s).values())) == 1


def test_faces_of_counts():
    # faces of the square with dim <= 1: 4 vertices + 4 edges
    assert len(faces_of((2, 2), 1)) == 8
