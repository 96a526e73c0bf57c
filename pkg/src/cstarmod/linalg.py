"""Dense complex linear algebra built on a cyclic Jacobi eigensolver.

Every block-level computation in the package (singular values, generalized
inverses, square roots of positive blocks) reduces to :func:`hermitian_eig`.
Matrices are plain ``complex128`` numpy arrays.
"""
from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, NotHermitian, NotPSD

EPS = np.finfo(np.float64).eps
MAX_SWEEPS = 100
JACOBI_RTOL = _kernels.JACOBI_RTOL
# relative singular-value cutoff used by every operator-level generalized
# inverse; the max(m, n) * eps rule sits below the rounding floor of
# exactly rank-deficient products
RANK_RTOL = 1e-10
# refinement passes applied to the Gram matrix of a @ v inside svd
_SVD_REFINE = 3


def as_cmatrix(a) -> np.ndarray:
    """Return ``a`` as a 2-D complex128 array, rejecting NaN/Inf."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def opnorm(a: np.ndarray) -> float:
    """Largest singular value of ``a`` (0 for empty matrices)."""
    if a.size == 0:
        return 0.0
    return float(svd(a)[1][0]) if min(a.shape) else 0.0


def hermitian_eig(a, tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    a : (n, n) array_like
        Hermitian matrix.
    tol : float, optional
        Admissible ``max |a - a*|``.  Defaults to ``1e-9 * (1 + max |a|)``.

    Returns
    -------
    w : (n,) ndarray
        Real eigenvalues in descending order; ties keep original column order.
    u : (n, n) ndarray
        Unitary matrix with ``a = u @ diag(w) @ u*``.
    """
    a = as_cmatrix(a)
    n, m = a.shape
    if n != m:
        raise DimensionMismatch(f"hermitian_eig needs a square matrix, got {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if tol is None:
        tol = 1e-9 * (1.0 + scale)
    if a.size and float(np.max(np.abs(a - a.conj().T))) > tol:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    work = np.ascontiguousarray(0.5 * (a + a.conj().T))
    v = np.eye(n, dtype=np.complex128)
    if n:
        fro = float(np.linalg.norm(work))
        if fro > 0.0:
            _kernels.jacobi_sweeps(work, v, JACOBI_RTOL * fro, MAX_SWEEPS)
    w = np.real(np.diag(work)).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def numerical_rank(sigma, m: int, n: int) -> int:
    """Count singular values above ``max(m, n) * eps * sigma[0]``."""
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    cutoff = max(m, n) * EPS * sigma[0]
    return int(np.count_nonzero(sigma > cutoff))


def svd(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin singular value decomposition ``a = u @ diag(sigma) @ v*``.

    Right singular vectors come from the eigenvectors of ``a* a`` (or of
    ``a a*`` for wide ``a``), then are polished by re-diagonalizing the Gram
    matrix of ``a @ v`` so that small singular values are read off as column
    norms instead of square roots of tiny eigenvalues.  Left vectors on the
    numerical-rank support are ``a v / sigma``; the rest are completed by
    Gram-Schmidt.

    Returns ``u`` (m, k), ``sigma`` (k,) descending and ``v`` (n, k) with
    ``k = min(m, n)``.
    """
    a = as_cmatrix(a)
    m, n = a.shape
    if m < n:
        u, s, v = svd(a.conj().T)
        return v, s, u
    if n == 0:
        return np.zeros((m, 0), complex), np.zeros(0), np.zeros((n, 0), complex)
    return _kernels.svd_core(np.ascontiguousarray(a), MAX_SWEEPS, _SVD_REFINE)


def mat_pinv(a, rank_tol: float | None = None, atol: float = 0.0) -> np.ndarray:
    """Moore-Penrose generalized inverse via :func:`svd`.

    ``rank_tol`` is a cutoff relative to the largest singular value; when
    omitted the :func:`numerical_rank` rule is used.  Singular values at or
    below ``atol`` are always treated as zero.
    """
    a = as_cmatrix(a)
    m, n = a.shape
    if a.size == 0:
        return np.zeros((n, m), dtype=np.complex128)
    u, s, v = svd(a)
    if rank_tol is None:
        r = numerical_rank(s, m, n)
    else:
        r = int(np.count_nonzero(s > rank_tol * s[0])) if s[0] > 0 else 0
    r = min(r, int(np.count_nonzero(s > atol)))
    return (v[:, :r] / s[:r]) @ u[:, :r].conj().T


def psd_sqrt(a, tol: float | None = None, clamp: float | None = None) -> np.ndarray:
    """Positive square root of a Hermitian positive semidefinite matrix.

    Eigenvalues below ``-tol`` raise :class:`NotPSD`.  Eigenvalues at or below
    ``clamp`` (default ``64 * n * eps * max eigenvalue``) are set to zero, so
    rounding noise in a singular ``a`` does not turn into spurious
    ``sqrt(eps)``-sized directions.
    """
    a = as_cmatrix(a)
    n = a.shape[0]
    if n == 0:
        return a.copy()
    scale = float(np.max(np.abs(a)))
    if tol is None:
        tol = 1e-9 * (1.0 + scale)
    w, u = hermitian_eig(a, tol=tol)
    if w[-1] < -tol:
        raise NotPSD(f"minimum eigenvalue {w[-1]:.3e} below -{tol:.3e}")
    if clamp is None:
        clamp = 64 * n * EPS * max(w[0], 0.0)
    root = np.where(w > clamp, np.sqrt(np.maximum(w, 0.0)), 0.0)
    b = (u * root) @ u.conj().T
    return 0.5 * (b + b.conj().T)
