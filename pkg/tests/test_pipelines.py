import pytest

from cayleytri.errors import InputError
from cayleytri.pipelines import (
    parity_shapes,
    prism_is_cyclic,
    run_pipeline,
    stage_lemma1,
    stage_parity,
    stage_spread_chain,
)
from cayleytri.pipelines import cyclic_prism
from cayleytri.skeleton import extend_skeleton

from conftest import U1, U2


def test_spread_chain_artifact():
    res = stage_spread_chain()
    chain = [tuple(map(tuple, c["positions"])) for c in res.artifact["chain"]]
    assert chain[1:3] == [U1, U2]
    assert all(c["spread_out"] for c in res.artifact["chain"])
    assert res.manifest.verdicts == {"planned": "SAT", "greedy": "SAT"}


def test_spread_chain_ignores_jobs_and_seed():
    a = stage_spread_chain()
    b = stage_spread_chain(jobs=2, shuffle_seed=9)
    assert a.manifest.artifact_digest == b.manifest.artifact_digest


def test_lemma1_small():
    res = stage_lemma1([(3, 3), (2, 4)])
    assert res.manifest.verdicts == {"violations": 0}
    assert [r["systems"] for r in res.artifact["shapes"]] == [216, 64]


def test_parity_small():
    res = stage_parity(max_sum=5)
    assert res.artifact["exceptions"] == 0
    assert res.artifact["obstructions"] == {"cyclic_prism_2to3": "non-extendable"}
    rows = {tuple(r["shape"]): r for r in res.artifact["shapes"]}
    assert rows[(3, 2)]["2to3"] == {"skeletons": 8, "failures": 2, "failures_not_cyclic_prism": 0}


def test_prism_witness_is_cyclic():
    sk = cyclic_prism()
    res = extend_skeleton(sk, 3)
    assert prism_is_cyclic(res.witness, sk.assignment)


def test_parity_shapes():
    assert (3, 4) in parity_shapes(7) and (4, 4) not in parity_shapes(7)


def test_unknown_stage():
    with pytest.raises(InputError):
        run_pipeline("s99")
