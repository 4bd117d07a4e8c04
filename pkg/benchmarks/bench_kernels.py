"""Time the numba kernels against the numpy/LAPACK fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5] [--sizes 1e3,1e4,1e5,1e6]

Both backends are imported from the same module, so one process compares
them directly; numba compilation is excluded by a warm-up call.
"""
import argparse
import time

import numpy as np

from oscint import kernels


def best_of(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="1e3,1e4,1e5,1e6")
    args = ap.parse_args()
    sizes = [int(float(s)) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)

    print(f"{'kernel':<14}{'n':>9}{'numba [ms]':>13}{'numpy [ms]':>13}{'speedup':>9}")
    for n in sizes:
        e = (1.0 / n) ** 2
        b = rng.standard_normal(n)
        cases = [
            ("det_scan", lambda: kernels._det_scan_jit(n, e, False), lambda: kernels._det_scan_np(n, e, False)),
            ("solve", lambda: kernels._solve_jit(e, b.copy()), lambda: kernels._solve_np(e, b.copy())),
            ("comp_sum", lambda: kernels._neumaier_sum_jit(b), lambda: kernels._fsum_np(b)),
            ("cos_riemann", lambda: kernels._cos_riemann_jit(1.0, 1.0, n),
             lambda: kernels._cos_riemann_np(1.0, 1.0, n)),
        ]
        for name, fast, slow in cases:
            a = best_of(fast, args.repeat)
            c = best_of(slow, args.repeat)
            print(f"{name:<14}{n:>9}{a * 1e3:>13.3f}{c * 1e3:>13.3f}{c / a:>9.1f}")


if __name__ == "__main__":
    main()
