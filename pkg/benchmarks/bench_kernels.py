"""Compare the compiled and pure-numpy kernel backends.

Usage: python benchmarks/bench_kernels.py [--repeat 200]
"""

import argparse
import time

import numpy as np

from nullattack._kernels import py_backend
from nullattack.core import make_rng

try:
    from nullattack._kernels import _cy_core
except ImportError:
    _cy_core = None


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_backend(impl, rng, repeat):
    n, q = 768, 64
    x = rng.standard_normal(n)
    lo = np.zeros(n)
    hi = np.ones(n)
    dirs = rng.standard_normal((q, n))
    weights = rng.standard_normal(q)
    s1 = rng.uniform(0.2, 0.8, n)
    step = rng.standard_normal(n)
    step *= 0.5 / np.linalg.norm(step)
    s2 = np.clip(s1 + step, lo, hi)

    return {
        "project": _time(lambda: impl.project(x, lo, hi), repeat),
        "weighted_mean": _time(lambda: impl.weighted_mean(dirs, weights),
                               repeat),
        "slide": _time(lambda: impl.slide(s1, s2, 0.5, lo, hi, 20), repeat),
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()

    results = {"python": bench_backend(py_backend, make_rng(0), args.repeat)}
    if _cy_core is not None:
        results["cython"] = bench_backend(_cy_core, make_rng(0), args.repeat)
    else:
        print("compiled backend unavailable; benchmarking python only")

    kernels = sorted(results["python"])
    print(f"{'kernel':<16}" + "".join(f"{name:>14}" for name in results)
          + ("" if len(results) < 2 else f"{'speedup':>10}"))
    for kernel in kernels:
        row = f"{kernel:<16}"
        for name in results:
            row += f"{results[name][kernel] * 1e6:>12.2f}us"
        if len(results) == 2:
            row += f"{results['python'][kernel] / results['cython'][kernel]:>9.2f}x"
        print(row)


if __name__ == "__main__":
    main()
