#!/usr/bin/env python3
"""Benchmark the lattice-scan backends (numba @njit vs pure numpy).

Usage: python benchmarks/bench_kernels.py [--repeats N]

Runs the pessimistic lattice scan over a range of board sizes and
resolutions with both backends and prints a CSV table of timings plus the
speedup. The numba path is warmed once so JIT compilation is not billed.
"""

import argparse
import time

import numpy as np

from rsekit import kernels


def time_fn(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    if not kernels._HAVE_NUMBA:
        print("numba backend unavailable (RSEKIT_KERNELS=numpy?); "
              "benchmarking numpy only")

    rng = np.random.default_rng(0)
    cases = [(2, 4, 200), (3, 4, 100), (3, 4, 200), (4, 4, 60), (4, 4, 120)]
    print("m,n,resolution,points,numpy_s,numba_s,speedup")
    for m, n, res in cases:
        u_l = rng.uniform(size=(m, n))
        u_f = rng.uniform(size=(m, n))
        points = kernels.count_compositions(res, m)
        t_np = time_fn(kernels._scan_numpy, u_l, u_f, 0.2, 1e-9, res,
                       repeats=args.repeats)
        if kernels._HAVE_NUMBA:
            kernels._scan_numba_impl(u_l, u_f, 0.2, 1e-9, res)  # warm the JIT
            t_nb = time_fn(kernels._scan_numba_impl, u_l, u_f, 0.2, 1e-9, res,
                           repeats=args.repeats)
            v_np, c_np = kernels._scan_numpy(u_l, u_f, 0.2, 1e-9, res)
            v_nb, c_nb = kernels._scan_numba_impl(u_l, u_f, 0.2, 1e-9, res)
            assert abs(v_np - v_nb) < 1e-9 and list(c_np) == list(c_nb)
            print(f"{m},{n},{res},{points},{t_np:.4f},{t_nb:.4f},"
                  f"{t_np / t_nb:.1f}x")
        else:
            print(f"{m},{n},{res},{points},{t_np:.4f},,")


if __name__ == "__main__":
    main()
