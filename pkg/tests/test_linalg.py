import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cstarmod import _kernels, linalg
from cstarmod.errors import DimensionMismatch, NotHermitian, NotPSD
from conftest import cgauss


def residual_scale(a):
    return 1.0 + np.linalg.norm(a, 2)


# -- hermitian_eig ---------------------------------------------------------

def test_eig_identity():
    w, u = linalg.hermitian_eig(np.eye(2))
    assert np.array_equal(w, [1.0, 1.0])
    assert np.array_equal(np.abs(u), np.eye(2))


def test_eig_diagonal():
    w, u = linalg.hermitian_eig(np.diag([3.0, 1.0]))
    np.testing.assert_array_equal(w, [3.0, 1.0])
    np.testing.assert_array_equal(u, np.eye(2))


def test_eig_swap():
    w, _ = linalg.hermitian_eig([[0, 1], [1, 0]])
    np.testing.assert_allclose(w, [1.0, -1.0], atol=1e-15)


def test_eig_ties_keep_column_order():
    w, u = linalg.hermitian_eig(np.diag([1.0, 2.0, 1.0]))
    np.testing.assert_array_equal(w, [2.0, 1.0, 1.0])
    np.testing.assert_array_equal(u, np.eye(3)[:, [1, 0, 2]])


def test_eig_errors():
    with pytest.raises(DimensionMismatch):
        linalg.hermitian_eig(np.ones((2, 3)))
    with pytest.raises(NotHermitian):
        linalg.hermitian_eig([[0, 1], [0, 0]])


@pytest.mark.parametrize("n", [1, 2, 5, 8, 16])
def test_eig_contract(rng, n):
    for _ in range(20):
        c = cgauss(rng, n, n)
        a = c + c.conj().T
        w, u = linalg.hermitian_eig(a)
        assert np.all(np.diff(w) <= 0)
        assert np.max(np.abs(u @ np.diag(w) @ u.conj().T - a)) <= 1e-10 * residual_scale(a)
        assert np.max(np.abs(u.conj().T @ u - np.eye(n))) <= 1e-12
        np.testing.assert_allclose(w, np.linalg.eigvalsh(a)[::-1], atol=1e-12 * residual_scale(a))


def test_eig_unitary_invariance(rng):
    for n in (2, 4, 7):
        c = cgauss(rng, n, n)
        a = c + c.conj().T
        q, _ = np.linalg.qr(cgauss(rng, n, n))
        w1, _ = linalg.hermitian_eig(a)
        w2, _ = linalg.hermitian_eig(q @ a @ q.conj().T)
        assert np.max(np.abs(w1 - w2)) <= 1e-9


def test_numpy_and_numba_kernels_agree(rng):
    if _kernels.jacobi_numba is None:
        pytest.skip("numba unavailable")
    for n in (1, 3, 9):
        c = cgauss(rng, n, n)
        a = c + c.conj().T
        outs = []
        for kern in (_kernels.jacobi_numpy, _kernels.jacobi_numba):
            work, v = a.copy(), np.eye(n, dtype=complex)
            kern(work, v, 1e-14 * np.linalg.norm(a), 100)
            outs.append(np.sort(np.real(np.diag(work))))
        np.testing.assert_allclose(outs[0], outs[1], atol=1e-12)
        m = cgauss(rng, n + 2, n)
        u1, s1, v1 = _kernels.svd_numpy(m)
        u2, s2, v2 = _kernels.svd_numba(m)
        np.testing.assert_allclose(s1, s2, atol=1e-12)
        np.testing.assert_allclose(u1 * s1 @ v1.conj().T, u2 * s2 @ v2.conj().T, atol=1e-12)


# -- svd ---------------------------------------------------------------------

def test_svd_identity():
    _, s, _ = linalg.svd(np.eye(2))
    np.testing.assert_allclose(s, [1.0, 1.0], atol=1e-15)


def test_svd_zero():
    u, s, v = linalg.svd(np.zeros((2, 3)))
    np.testing.assert_array_equal(s, [0.0, 0.0])
    assert np.max(np.abs(u.conj().T @ u - np.eye(2))) <= 1e-12
    assert np.max(np.abs(v.conj().T @ v - np.eye(2))) <= 1e-12


def test_svd_empty():
    u, s, v = linalg.svd(np.zeros((3, 0)))
    assert u.shape == (3, 0) and s.shape == (0,) and v.shape == (0, 0)


@pytest.mark.parametrize("shape", [(3, 2), (2, 3), (1, 5), (6, 6), (8, 3)])
def test_svd_reconstruction(rng, shape):
    for _ in range(10):
        a = cgauss(rng, *shape)
        u, s, v = linalg.svd(a)
        # oracle: multiply the returned factors back together
        assert np.max(np.abs(u @ np.diag(s) @ v.conj().T - a)) <= 1e-10 * residual_scale(a)
        k = min(shape)
        assert np.max(np.abs(u.conj().T @ u - np.eye(k))) <= 1e-12
        assert np.max(np.abs(v.conj().T @ v - np.eye(k))) <= 1e-12
        np.testing.assert_allclose(s, np.linalg.svd(a, compute_uv=False), atol=1e-12 * residual_scale(a))


def test_svd_rank_deficient(rng):
    for r in range(4):
        a = cgauss(rng, 6, r) @ cgauss(rng, r, 5)
        u, s, v = linalg.svd(a)
        assert np.max(np.abs(u @ np.diag(s) @ v.conj().T - a)) <= 1e-10 * residual_scale(a)
        assert np.max(np.abs(u.conj().T @ u - np.eye(5))) <= 1e-12
        assert np.all(s[r:] <= 1e-12 * residual_scale(a))


def test_svd_matches_sqrt_of_gram_eigenvalues(rng):
    for shape in [(4, 4), (5, 3), (3, 5)]:
        a = cgauss(rng, *shape)
        _, s, _ = linalg.svd(a)
        gram = a.conj().T @ a if shape[0] >= shape[1] else a @ a.conj().T
        w, _ = linalg.hermitian_eig(gram)
        np.testing.assert_allclose(s, np.sqrt(np.maximum(w, 0)), atol=1e-9)


# -- numerical rank -------------------------------------------------------------

def test_numerical_rank_examples():
    assert linalg.numerical_rank([5, 2, 0], 3, 3) == 2
    assert linalg.numerical_rank([0, 0], 2, 2) == 0
    # cutoff 2 * eps * 1 ~ 4.4e-16 sits above 1e-18
    assert 2 * linalg.EPS > 1e-18
    assert linalg.numerical_rank([1, 1e-18], 2, 2) == 1
    assert linalg.numerical_rank([], 0, 0) == 0


# -- pseudoinverse -----------------------------------------------------------------

def penrose(a, p):
    return (
        np.max(np.abs(a @ p @ a - a)),
        np.max(np.abs(p @ a @ p - p)),
        np.max(np.abs((a @ p).conj().T - a @ p)),
        np.max(np.abs((p @ a).conj().T - p @ a)),
    )


def test_pinv_examples():
    np.testing.assert_allclose(linalg.mat_pinv(np.eye(2)), np.eye(2), atol=1e-15)
    np.testing.assert_array_equal(linalg.mat_pinv(np.zeros((2, 3))), np.zeros((3, 2)))
    np.testing.assert_allclose(linalg.mat_pinv(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]), atol=1e-15)


def test_pinv_matches_regularized_oracle(rng):
    delta = 1e-10
    checked = 0
    while checked < 20:
        a = cgauss(rng, 3, 2)
        s = np.linalg.svd(a, compute_uv=False)
        if s[-1] < 0.1:
            continue
        oracle = np.linalg.solve(a.conj().T @ a + delta * np.eye(2), a.conj().T)
        assert np.max(np.abs(linalg.mat_pinv(a) - oracle)) <= 1e-4
        checked += 1


@pytest.mark.parametrize("shape", [(1, 1), (3, 2), (2, 5), (8, 8), (7, 4)])
def test_pinv_penrose(rng, shape):
    for _ in range(10):
        a = cgauss(rng, *shape)
        p = linalg.mat_pinv(a)
        assert max(penrose(a, p)) <= 1e-10 * residual_scale(a)
        assert np.max(np.abs(linalg.mat_pinv(p) - a)) <= 1e-8 * residual_scale(a)


def test_pinv_rank_deficient_with_relative_cutoff(rng):
    for r in range(4):
        a = cgauss(rng, 5, r) @ cgauss(rng, r, 4)
        p = linalg.mat_pinv(a, linalg.RANK_RTOL)
        assert max(penrose(a, p)) <= 1e-10 * residual_scale(a)
        np.testing.assert_allclose(p, np.linalg.pinv(a, rcond=1e-10), atol=1e-9)


def test_pinv_absolute_floor():
    a = np.diag([1e-13, 1e-14])
    assert np.max(np.abs(linalg.mat_pinv(a, linalg.RANK_RTOL))) > 1e12
    np.testing.assert_array_equal(linalg.mat_pinv(a, linalg.RANK_RTOL, atol=1e-10), np.zeros((2, 2)))


complex_matrices = st.integers(1, 8).flatmap(
    lambda m: st.integers(1, 8).flatmap(
        lambda n: st.integers(0, 2**32 - 1).map(
            lambda seed: cgauss(np.random.default_rng(seed), m, n))))


@settings(max_examples=60, deadline=None)
@given(complex_matrices)
def test_pinv_penrose_property(a):
    p = linalg.mat_pinv(a)
    assert max(penrose(a, p)) <= 1e-10 * residual_scale(a)


@settings(max_examples=60, deadline=None)
@given(complex_matrices)
def test_pinv_involution_property(a):
    assert np.max(np.abs(linalg.mat_pinv(linalg.mat_pinv(a)) - a)) <= 1e-8 * residual_scale(a)


# -- psd sqrt ---------------------------------------------------------------------

def test_psd_sqrt_examples():
    np.testing.assert_allclose(linalg.psd_sqrt(np.eye(2)), np.eye(2), atol=1e-15)
    np.testing.assert_allclose(linalg.psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-15)


def test_psd_sqrt_random(rng):
    for n in (1, 3, 6):
        c = cgauss(rng, n + 1, n)
        a = c.conj().T @ c
        b = linalg.psd_sqrt(a)
        assert np.max(np.abs(b - b.conj().T)) == 0.0
        assert np.linalg.eigvalsh(b).min() >= -1e-12
        assert np.max(np.abs(b @ b - a)) <= 1e-9 * residual_scale(a)


def test_psd_sqrt_singular_input_has_exact_kernel(rng):
    c = cgauss(rng, 2, 5)
    a = c.conj().T @ c
    b = linalg.psd_sqrt(a)
    w = np.linalg.eigvalsh(b)
    # three exact-zero eigenvalues up to rounding, not sqrt(eps)-sized ones
    assert np.all(np.abs(w[:3]) <= 1e-13)
    assert np.max(np.abs(b @ b - a)) <= 1e-9 * residual_scale(a)


def test_psd_sqrt_rejects_negative():
    with pytest.raises(NotPSD):
        linalg.psd_sqrt(np.diag([1.0, -1.0]))


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        linalg.svd(np.array([[np.nan]]))


def test_env_flag_selects_numpy_backend():
    import os
    import subprocess
    import sys

    env = dict(os.environ, CSTARMOD_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "import cstarmod; print(cstarmod.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "numpy"


# a Penrose residual matrix whose singular values spread down to 1e-48: its
# third left vector is numerically dependent on the first and used to come
# back as a copy of it (numba) or as 0/0 (numpy)
DEPENDENT_COLUMN = np.array([
    [-1.3877787807814457e-17j, 5.421010862427522e-20, 2.7755575615628914e-17],
    [-5.421010862427522e-20, 0, 0],
    [-2.7755575615628914e-17, 0, 0],
], dtype=complex)


@pytest.mark.parametrize("kernel", ["svd_numpy", "svd_numba"])
def test_svd_dependent_noise_column(kernel):
    fn = getattr(_kernels, kernel)
    if fn is None:
        pytest.skip("numba unavailable")
    with np.errstate(all="raise"):
        u, s, v = fn(DEPENDENT_COLUMN)
    assert np.max(np.abs(u.conj().T @ u - np.eye(3))) <= 1e-12
    assert np.max(np.abs(v.conj().T @ v - np.eye(3))) <= 1e-12
    assert np.max(np.abs(u * s @ v.conj().T - DEPENDENT_COLUMN)) <= 1e-30
