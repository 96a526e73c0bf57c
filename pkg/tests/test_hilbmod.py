import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cstarmod.calgebra import AlgElem, BlockAlgebra, alg_positive
from cstarmod.errors import AlgebraMismatch, ModuleMismatch
from cstarmod.hilbmod import (
    FreeModule,
    ModVector,
    Submodule,
    biorth_check,
    biorth_residual,
    complement_submodule,
    direct_sum,
    inner,
    orth_complement,
    pair,
    split,
    submodule_localize,
    submodule_projector,
    vec_connect,
    vec_localize,
    vec_seminorm,
)
from cstarmod.opmap import ModuleMap, op_predicates
from conftest import block_dist, cgauss

ALG = BlockAlgebra((1, 2))


def vec(rng, module):
    return ModVector(module, [cgauss(rng, *b.shape) for b in module.zero().blocks])


def elem(rng, alg=ALG):
    return AlgElem(alg, [cgauss(rng, d, d) for d in alg.dims])


def test_basis_and_coords():
    e = FreeModule(ALG, 2)
    e1 = e.basis_vector(1)
    c = e1.coords
    assert c[0] == ALG.zero() and c[1] == ALG.identity()
    assert inner(e1, e1) == ALG.identity()
    assert inner(e.basis_vector(0), e1) == ALG.zero()
    assert ModVector.from_coords(e, c) == e1


def test_inner_example():
    alg = BlockAlgebra((1,))
    e = FreeModule(alg, 2)
    x = ModVector(e, [np.array([[1j], [2]])])
    y = ModVector(e, [np.array([[3], [1j]])])
    # conj(1j)*3 + conj(2)*1j
    assert inner(x, y) == AlgElem(alg, [[[-3j + 2j]]])


def test_module_mismatch():
    with pytest.raises(ModuleMismatch):
        FreeModule(ALG, 1).zero() + FreeModule(ALG, 2).zero()


def test_direct_sum_exact_with_integers(rng):
    e, f = FreeModule(ALG, 2), FreeModule(ALG, 1)
    x = ModVector(e, [rng.integers(-5, 5, b.shape) + 1j * rng.integers(-5, 5, b.shape) for b in e.zero().blocks])
    y = ModVector(f, [rng.integers(-5, 5, b.shape) + 0j for b in f.zero().blocks])
    z = pair(x, y)
    assert z.module == direct_sum(e, f)
    assert split(z, 2) == (x, y)
    assert inner(z, z) == inner(x, x) + inner(y, y)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_inner_product_axioms(seed, rank):
    rng = np.random.default_rng(seed)
    e = FreeModule(ALG, rank)
    x, y, z = vec(rng, e), vec(rng, e), vec(rng, e)
    a = elem(rng)
    assert inner(x, y) == inner(y, x).star()
    assert alg_positive(inner(x, x), tol=1e-9)
    lin = inner(x, y * a + z) - (inner(x, y) * a + inner(x, z))
    assert lin.max_abs() <= 1e-12 * (1 + inner(x, y).max_abs() * a.max_abs())
    assert inner(e.zero(), e.zero()) == ALG.zero()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cauchy_schwarz_seminorm(seed):
    rng = np.random.default_rng(seed)
    e = FreeModule(ALG, 3)
    x, y = vec(rng, e), vec(rng, e)
    for p in ALG.all_seminorms():
        from cstarmod.calgebra import alg_seminorm
        lhs = alg_seminorm(p, inner(x, y))
        assert lhs <= vec_seminorm(p, x) * vec_seminorm(p, y) * (1 + 1e-12) + 1e-12


def test_vector_seminorm_matches_block_norm(rng):
    e = FreeModule(ALG, 2)
    x = vec(rng, e)
    assert vec_seminorm(ALG.seminorm([1]), x) == pytest.approx(np.linalg.norm(x.blocks[1], 2), rel=1e-12)
    assert vec_seminorm(ALG.seminorm([]), x) == 0.0


def test_localize_vectors(rng):
    alg = BlockAlgebra((1, 2, 2))
    e = FreeModule(alg, 2)
    x, a = vec(rng, e), elem(rng, alg)
    p, q = alg.seminorm([0, 2]), alg.seminorm([2])
    xp = vec_localize(p, x)
    assert xp.module == e.localize(p)
    assert vec_connect(p, q, xp) == vec_localize(q, x)
    assert vec_localize(p, x * a) == xp * __import__("cstarmod").calgebra.alg_localize(p, a)
    with pytest.raises(AlgebraMismatch):
        vec_localize(ALG.full(), x)


def test_projector_examples():
    e = FreeModule(ALG, 2)
    p = submodule_projector(Submodule(e, [e.basis_vector(0)]))
    assert block_dist(p, ModuleMap.from_entries(ALG, [[ALG.identity(), ALG.zero()], [ALG.zero(), ALG.zero()]])) <= 1e-14
    empty = submodule_projector(Submodule(e, []))
    assert empty == ModuleMap.zero(e, e)
    full = submodule_projector(Submodule(e, e.basis()))
    assert block_dist(full, ModuleMap.identity(e)) <= 1e-14


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(0, 4))
def test_projector_properties(seed, rank, count):
    rng = np.random.default_rng(seed)
    e = FreeModule(ALG, rank)
    gens = [vec(rng, e) for _ in range(count)]
    if gens and rng.random() < 0.5:
        gens.append(gens[0] * elem(rng))
    f = Submodule(e, gens)
    p = submodule_projector(f)
    flags = op_predicates(p, 1e-10)
    assert flags.projection and flags.positive
    for g in gens:
        assert block_dist(p.apply(g), g) <= 1e-9
    q = orth_complement(f)
    assert block_dist(p + q, ModuleMap.identity(e)) <= 1e-14
    x, y = vec(rng, e), vec(rng, e)
    assert inner(p.apply(x), q.apply(y)).max_abs() <= 1e-9
    assert biorth_residual(f) <= 1e-9
    assert biorth_check(f)
    c = complement_submodule(f)
    assert block_dist(submodule_projector(c), q) <= 1e-9


def test_submodule_localize(rng):
    alg = BlockAlgebra((1, 2, 3))
    e = FreeModule(alg, 2)
    f = Submodule(e, [vec(rng, e)])
    p = alg.seminorm([1, 2])
    fp = submodule_localize(p, f)
    assert fp.module == e.localize(p)
    proj = submodule_projector(f)
    proj_p = submodule_projector(fp)
    for j, i in enumerate(p.support):
        np.testing.assert_allclose(proj_p.blocks[j], proj.blocks[i], atol=1e-12)
