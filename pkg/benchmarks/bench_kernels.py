"""Time the Jacobi and SVD kernels: numba against the pure-numpy fallback.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.  Inputs are the
block sizes the package actually sees (at most 12x12 for rank 4 over M_3).
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from cstarmod import _kernels


def _time(fn, inputs, repeat):
    best = np.inf
    for _ in range(repeat):
        start = time.perf_counter()
        for a in inputs:
            fn(a)
        best = min(best, time.perf_counter() - start)
    return best / len(inputs)


def _jacobi(kern):
    def run(a):
        work = a.copy()
        v = np.eye(a.shape[0], dtype=complex)
        kern(work, v, 1e-14 * np.linalg.norm(a), 100)
    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--count", type=int, default=50)
    args = ap.parse_args(argv)
    if _kernels.jacobi_numba is None:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<8}{'n':>4}{'numpy us':>12}{'numba us':>12}{'speedup':>10}")
    for n in (2, 4, 8, 12):
        herm, tall = [], []
        for _ in range(args.count):
            c = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            herm.append(c + c.conj().T)
            tall.append(rng.standard_normal((n + 2, n)) + 1j * rng.standard_normal((n + 2, n)))
        # warm up the JIT before timing
        _jacobi(_kernels.jacobi_numba)(herm[0])
        _kernels.svd_numba(tall[0])
        rows = [
            ("jacobi", _jacobi(_kernels.jacobi_numpy), _jacobi(_kernels.jacobi_numba), herm),
            ("svd", _kernels.svd_numpy, _kernels.svd_numba, tall),
        ]
        for name, slow, fast, inputs in rows:
            t_np = _time(slow, inputs, args.repeat) * 1e6
            t_nb = _time(fast, inputs, args.repeat) * 1e6
            print(f"{name:<8}{n:>4}{t_np:>12.1f}{t_nb:>12.1f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
