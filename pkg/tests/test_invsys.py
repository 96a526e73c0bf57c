import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cstarmod.calgebra import BlockAlgebra
from cstarmod.errors import AlgebraMismatch, NotComparable
from cstarmod.harness import random_map, random_vector
from cstarmod.hilbmod import FreeModule, vec_localize
from cstarmod.invsys import (
    LocalizedOp,
    commutation_suite,
    connect_op,
    localize_op,
    report_summary,
    sample_seminorms,
    unitary_transfer,
)
from cstarmod.opmap import ModuleMap

ALG3 = BlockAlgebra((1, 2, 2))


def test_localize_and_connect(rng):
    t = random_map(rng, FreeModule(ALG3, 2), FreeModule(ALG3, 1))
    p, q = ALG3.seminorm([0, 2]), ALG3.seminorm([2])
    tp = localize_op(p, t)
    assert tp.map.algebra.dims == (1, 2)
    assert connect_op(p, q, tp) == localize_op(q, t)
    with pytest.raises(NotComparable):
        connect_op(p, ALG3.seminorm([1]), tp)
    with pytest.raises(AlgebraMismatch):
        connect_op(q, q, tp)
    with pytest.raises(AlgebraMismatch):
        LocalizedOp(q, t)


def test_action_commutes(rng):
    t = random_map(rng, FreeModule(ALG3, 2), FreeModule(ALG3, 3))
    x = random_vector(rng, t.domain)
    for p in ALG3.all_seminorms():
        assert vec_localize(p, t.apply(x)) == localize_op(p, t).map.apply(vec_localize(p, x))


def test_sample_seminorms():
    assert len(sample_seminorms(BlockAlgebra((1, 1)))) == 4
    big = BlockAlgebra((1,) * 6)
    s = sample_seminorms(big, np.random.default_rng(0))
    assert big.full() in s and all(big.seminorm([i]) in s for i in range(6))
    assert s == sample_seminorms(big, np.random.default_rng(0))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_commutation_suite_passes(seed, low):
    rng = np.random.default_rng(seed)
    t = random_map(rng, FreeModule(ALG3, 2), FreeModule(ALG3, 2), low_rank=low)
    report = commutation_suite(t, trials=2, seed=seed)
    assert len(report) == 6 * 8
    assert all(e["pass"] for e in report), [e for e in report if not e["pass"]]


def test_commutation_suite_falsifies(rng):
    t = random_map(rng, FreeModule(ALG3, 2), FreeModule(ALG3, 2))
    report = commutation_suite(t, corrupt_block=1)
    summary = report_summary(report)
    for law in ("adjoint", "pinv", "polar", "range_projector"):
        assert not summary[law]["pass"]
        for e in report:
            if e["law"] == law:
                assert e["pass"] == (1 not in e["seminorm"])
    assert not summary["projection_transfer"]["pass"]
    assert summary["action"]["pass"]


def test_unitary_transfer():
    alg = BlockAlgebra((1, 2))
    e = FreeModule(alg, 1)
    u = ModuleMap(e, e, [np.array([[1j]]), np.array([[0, 1], [1, 0]], complex)])
    assert unitary_transfer(u, alg.all_seminorms()) == (True, True)
    half = ModuleMap(e, e, [np.array([[1.0]]), np.diag([1.0, 0.0])])
    assert unitary_transfer(half, alg.all_seminorms()) == (False, False)
