"""Compare the compiled and pure-Python kernels on SMO and DBSCAN.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from isakit import _pykernels
from isakit.svm import Kernel

try:
    from isakit import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def smo_case(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 2))
    y = np.where(x[:, 0] * x[:, 1] > 0, 1.0, -1.0)
    K = Kernel.rbf(1.0)(x, x)
    return np.ascontiguousarray(K), y


def dbscan_case(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    centres = rng.uniform(-5, 5, size=(4, 2))
    pts = centres[rng.integers(0, 4, size=n)] + 0.5 * rng.normal(size=(n, 2))
    return np.ascontiguousarray(pts)


def _time(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled kernels unavailable; timing the fallback only")

    print(f"{'kernel':<8} {'n':>6} " + " ".join(f"{name:>10}" for name, _ in backends) + "   speedup")
    for n in (100, 200, 400):
        K, y = smo_case(n)
        times = []
        for _, mod in backends:
            times.append(_time(lambda: mod.smo_solve(K, y, 10.0, 1e-8, 10 * n * n), args.repeat))
        ratio = times[0] / times[-1] if len(times) > 1 else float("nan")
        print(f"{'smo':<8} {n:>6} " + " ".join(f"{t * 1e3:>8.2f}ms" for t in times) + f"   {ratio:7.1f}x")
    for n in (500, 1000, 2000):
        pts = dbscan_case(n)
        times = []
        for _, mod in backends:
            times.append(_time(lambda: mod.dbscan(pts, 0.4, 5), args.repeat))
        ratio = times[0] / times[-1] if len(times) > 1 else float("nan")
        print(f"{'dbscan':<8} {n:>6} " + " ".join(f"{t * 1e3:>8.2f}ms" for t in times) + f"   {ratio:7.1f}x")


if __name__ == "__main__":
    main()
