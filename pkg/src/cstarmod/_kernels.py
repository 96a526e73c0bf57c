"""Cyclic Jacobi sweeps for complex Hermitian matrices.

Two interchangeable implementations live here: a numba ``@njit`` kernel and a
pure-numpy fallback.  ``jacobi_sweeps`` dispatches to the numba kernel unless
numba is missing or ``CSTARMOD_DISABLE_NUMBA`` is set to a truthy value in the
environment when the package is first imported.
"""
from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None

# rotations on entries below _TINY are skipped; past _HUGE, t ~ 1/(2 theta)
_TINY = 1e-290
# a unit column whose projected norm drops below this is treated as dependent
_DEPENDENT = 1e-8
_HUGE = 1e150

EPS = np.finfo(np.float64).eps
# sweeping stops once the off-diagonal Frobenius mass is below this fraction
JACOBI_RTOL = 1e-14

_DISABLE = os.environ.get("CSTARMOD_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


def _rotation(app, aqq, g):
    # zeroes the (p, q) entry; returns c, s, conj(phase) with J = [[c, s], [-s*ph, c*ph]]
    b = abs(g)
    e = g / b
    theta = (aqq - app) / (2.0 * b)
    if abs(theta) > _HUGE:
        t = 0.5 / theta
    elif theta >= 0.0:
        t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
    else:
        t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    return c, s, e.conjugate()


def jacobi_numpy(a, v, tol, max_sweeps):
    """Diagonalize Hermitian ``a`` in place, accumulating rotations into ``v``.

    Returns the number of sweeps performed.  On exit the diagonal of ``a``
    holds the eigenvalues and the columns of ``v`` the eigenvectors.
    """
    n = a.shape[0]
    offdiag = ~np.eye(n, dtype=bool)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        off = math.sqrt(float(np.sum(np.abs(a[offdiag]) ** 2)))
        if off <= tol:
            return sweeps - 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                if abs(g) < _TINY:
                    continue
                c, s, ph = _rotation(a[p, p].real, a[q, q].real, g)
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp - (s * ph) * colq
                a[:, q] = s * colp + (c * ph) * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                ph_c = ph.conjugate()
                a[p, :] = c * rowp - (s * ph_c) * rowq
                a[q, :] = s * rowp + (c * ph_c) * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - (s * ph) * vq
                v[:, q] = s * vp + (c * ph) * vq
    return sweeps


if numba is not None:

    @numba.njit(cache=True)
    def jacobi_numba(a, v, tol, max_sweeps):  # pragma: no cover - compiled
        n = a.shape[0]
        for sweep in range(max_sweeps):
            off = 0.0
            for i in range(n):
                for j in range(n):
                    if i != j:
                        off += a[i, j].real ** 2 + a[i, j].imag ** 2
            if math.sqrt(off) <= tol:
                return sweep
            for p in range(n - 1):
                for q in range(p + 1, n):
                    g = a[p, q]
                    b = abs(g)
                    if b < 1e-290:
                        continue
                    e = g / b
                    theta = (a[q, q].real - a[p, p].real) / (2.0 * b)
                    if abs(theta) > 1e150:
                        t = 0.5 / theta
                    elif theta >= 0.0:
                        t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                    else:
                        t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                    c = 1.0 / math.sqrt(t * t + 1.0)
                    s = t * c
                    ph = e.conjugate()
                    sph = s * ph
                    cph = c * ph
                    for k in range(n):
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = c * akp - sph * akq
                        a[k, q] = s * akp + cph * akq
                    sphc = sph.conjugate()
                    cphc = cph.conjugate()
                    for k in range(n):
                        apk = a[p, k]
                        aqk = a[q, k]
                        a[p, k] = c * apk - sphc * aqk
                        a[q, k] = s * apk + cphc * aqk
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    a[p, p] = a[p, p].real
                    a[q, q] = a[q, q].real
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = c * vkp - sph * vkq
                        v[k, q] = s * vkp + cph * vkq
        return max_sweeps

else:  # pragma: no cover
    jacobi_numba = None




def _eig_numpy(g, max_sweeps):
    w = np.ascontiguousarray(g.copy())
    v = np.eye(g.shape[0], dtype=np.complex128)
    fro = float(np.linalg.norm(w))
    if fro > 0.0:
        jacobi_numpy(w, v, JACOBI_RTOL * fro, max_sweeps)
    d = np.real(np.diag(w)).copy()
    order = np.argsort(-d, kind="stable")
    return d[order], v[:, order]


def svd_numpy(a, max_sweeps=100, refine=3):
    """Thin SVD of a tall (m >= n, n >= 1) matrix; numpy reference path.

    Right vectors diagonalize ``a* a``; they are then polished by
    re-diagonalizing the Gram matrix of ``b = a v`` until its columns are
    orthogonal to working precision.  ``sigma`` are the column norms of ``b``;
    ``u = b / sigma`` on the numerical-rank support, re-orthogonalized, and
    completed greedily from the standard basis.
    """
    m, n = a.shape
    _, v = _eig_numpy(a.conj().T @ a, max_sweeps)
    for _ in range(refine):
        b = a @ v
        g = b.conj().T @ b
        d = np.sqrt(np.maximum(np.real(np.diag(g)), 0.0))
        denom = np.outer(d, d)
        off = np.abs(g - np.diag(np.diag(g)))
        mask = denom > 0
        if not np.any(off[mask] > n * EPS * denom[mask]):
            break
        _, w = _eig_numpy(g, max_sweeps)
        v = v @ w
    b = a @ v
    sigma = np.linalg.norm(b, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma, v, b = sigma[order], v[:, order], b[:, order]
    r = 0
    if sigma[0] > 0.0:
        r = int(np.count_nonzero(sigma > max(m, n) * EPS * sigma[0]))
    u = np.zeros((m, n), dtype=np.complex128)
    u[:, :r] = b[:, :r] / sigma[:r]
    for _ in range(2):
        for j in range(r):
            col = u[:, j] - u[:, :j] @ (u[:, :j].conj().T @ u[:, j])
            nrm = np.linalg.norm(col)
            # a unit column that loses almost everything to the projection is
            # numerically dependent (its sigma is noise); it is refilled below
            u[:, j] = col / nrm if nrm > _DEPENDENT else 0.0
    missing = [j for j in range(r) if not np.any(u[:, j])] + list(range(r, n))
    eye = np.eye(m, dtype=np.complex128)
    for j in missing:
        # unfilled columns are zero, so projecting on all of u is harmless
        resid = eye - u @ (u.conj().T @ eye)
        resid = resid - u @ (u.conj().T @ resid)
        col = int(np.argmax(np.linalg.norm(resid, axis=0)))
        u[:, j] = resid[:, col] / np.linalg.norm(resid[:, col])
    return u, sigma, v


if numba is not None:

    @numba.njit(cache=True)
    def _ah_b(x, y):  # pragma: no cover - compiled
        # x^* y with explicit loops (no BLAS dependency)
        r, p = x.shape
        q = y.shape[1]
        out = np.zeros((p, q), dtype=np.complex128)
        for i in range(p):
            for j in range(q):
                acc = 0j
                for k in range(r):
                    acc += x[k, i].conjugate() * y[k, j]
                out[i, j] = acc
        return out

    @numba.njit(cache=True)
    def _a_b(x, y):  # pragma: no cover - compiled
        r, p = x.shape
        q = y.shape[1]
        out = np.zeros((r, q), dtype=np.complex128)
        for i in range(r):
            for k in range(p):
                xik = x[i, k]
                if xik != 0:
                    for j in range(q):
                        out[i, j] += xik * y[k, j]
        return out

    @numba.njit(cache=True)
    def _eig_numba(g, max_sweeps):  # pragma: no cover - compiled
        n = g.shape[0]
        w = g.copy()
        v = np.eye(n, dtype=np.complex128)
        fro = 0.0
        for i in range(n):
            for j in range(n):
                fro += w[i, j].real ** 2 + w[i, j].imag ** 2
        fro = math.sqrt(fro)
        if fro > 0.0:
            jacobi_numba(w, v, JACOBI_RTOL * fro, max_sweeps)
        d = np.empty(n)
        for i in range(n):
            d[i] = w[i, i].real
        order = np.argsort(-d, kind="mergesort")
        return d[order], v[:, order].copy()

    @numba.njit(cache=True)
    def svd_numba(a, max_sweeps=100, refine=3):  # pragma: no cover - compiled
        m, n = a.shape
        _, v = _eig_numba(_ah_b(a, a), max_sweeps)
        for _ in range(refine):
            b = _a_b(a, v)
            g = _ah_b(b, b)
            converged = True
            for j in range(n):
                for k in range(j + 1, n):
                    den = math.sqrt(max(g[j, j].real, 0.0) * max(g[k, k].real, 0.0))
                    if den > 0.0 and abs(g[j, k]) > n * EPS * den:
                        converged = False
            if converged:
                break
            _, w = _eig_numba(g, max_sweeps)
            v = _a_b(v, w)
        b = _a_b(a, v)
        sigma = np.empty(n)
        for j in range(n):
            acc = 0.0
            for i in range(m):
                acc += b[i, j].real ** 2 + b[i, j].imag ** 2
            sigma[j] = math.sqrt(acc)
        order = np.argsort(-sigma, kind="mergesort")
        sigma = sigma[order]
        v = v[:, order].copy()
        b = b[:, order].copy()
        r = 0
        if sigma[0] > 0.0:
            cut = max(m, n) * EPS * sigma[0]
            for j in range(n):
                if sigma[j] > cut:
                    r += 1
        u = np.zeros((m, n), dtype=np.complex128)
        for j in range(r):
            for i in range(m):
                u[i, j] = b[i, j] / sigma[j]
        for _ in range(2):
            for j in range(r):
                for k in range(j):
                    dot = 0j
                    for i in range(m):
                        dot += u[i, k].conjugate() * u[i, j]
                    for i in range(m):
                        u[i, j] -= dot * u[i, k]
                nrm = 0.0
                for i in range(m):
                    nrm += u[i, j].real ** 2 + u[i, j].imag ** 2
                nrm = math.sqrt(nrm)
                for i in range(m):
                    u[i, j] = u[i, j] / nrm if nrm > _DEPENDENT else 0.0
        missing = np.ones(n, dtype=np.bool_)
        for j in range(r):
            for i in range(m):
                if u[i, j] != 0.0:
                    missing[j] = False
                    break
        for j in range(n):
            if not missing[j]:
                continue
            best = -1.0
            col = np.zeros(m, dtype=np.complex128)
            for e in range(m):
                w = np.zeros(m, dtype=np.complex128)
                w[e] = 1.0
                for _ in range(2):
                    for k in range(n):
                        dot = 0j
                        for i in range(m):
                            dot += u[i, k].conjugate() * w[i]
                        for i in range(m):
                            w[i] -= dot * u[i, k]
                nrm = 0.0
                for i in range(m):
                    nrm += w[i].real ** 2 + w[i].imag ** 2
                nrm = math.sqrt(nrm)
                if nrm > best and nrm > 0.0:
                    best = nrm
                    col = w / nrm
            for i in range(m):
                u[i, j] = col[i]
        return u, sigma, v

else:  # pragma: no cover
    svd_numba = None


if jacobi_numba is not None and not _DISABLE:
    jacobi_sweeps = jacobi_numba
    svd_core = svd_numba
    BACKEND = "numba"
else:
    jacobi_sweeps = jacobi_numpy
    svd_core = svd_numpy
    BACKEND = "numpy"
