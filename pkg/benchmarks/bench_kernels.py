"""Benchmark of the correspondence-search kernels.

Times the compiled extension against the numpy fallback on matched random
clouds across a range of sizes and prints a small table. Run directly:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from iekf_slam.kernels import BACKEND, _fallback

try:
    from iekf_slam.kernels import _native
except ImportError:
    _native = None

SIZES = (100, 300, 1000, 3000)
REPEATS = 5


def time_impl(fn, source, target, max_dist):
    best = np.inf
    for _ in range(REPEATS):
        start = time.perf_counter()
        fn(source, target, max_dist)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    rng = np.random.default_rng(0)
    print(f"active backend: {BACKEND}")
    print(f"{'n':>6} {'fallback (ms)':>14} {'native (ms)':>12} {'speedup':>8}")
    for n in SIZES:
        source = 5.0 * rng.uniform(-1, 1, (n, 3))
        target = source + 0.05 * rng.standard_normal((n, 3))
        t_fb = time_impl(_fallback.batch_nearest, source, target, 0.5)
        if _native is None:
            print(f"{n:>6} {1e3 * t_fb:>14.3f} {'n/a':>12} {'n/a':>8}")
            continue
        idx_fb, dist_fb = _fallback.batch_nearest(source, target, 0.5)
        idx_nat, dist_nat = _native.batch_nearest(source, target, 0.5)
        assert np.array_equal(idx_fb, idx_nat) and np.allclose(dist_fb, dist_nat)
        t_nat = time_impl(_native.batch_nearest, source, target, 0.5)
        print(f"{n:>6} {1e3 * t_fb:>14.3f} {1e3 * t_nat:>12.3f} {t_fb / t_nat:>7.2f}x")


if __name__ == "__main__":
    main()
