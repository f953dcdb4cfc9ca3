#!/usr/bin/env python3
"""Benchmark the hot quadrature kernel: numba @njit versus pure numpy.

The evaluation engine spends essentially all of its time in phase_sum
(sum_j c_j exp(i k_j x) over a batch of x), so this compares the two
backends at realistic node/point counts.  Select the backend under test
with FOKAS_HEAT_BACKEND=numba|numpy (the numpy reference is always timed
via the explicitly exported fallback).

Usage:  python benchmarks/bench_phase_sum.py [--repeats 7]
"""

import argparse
import time

import numpy as np

from fokas_heat._accel import USING_NUMBA, phase_sum, phase_sum_numpy


def timeit(fn, *args, repeats=7):
    fn(*args)  # warm-up (JIT compile, cache fill)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=7)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"active backend: {'numba' if USING_NUMBA else 'numpy'}")
    print(f"{'n_x':>6} {'n_k':>7} {'active (ms)':>12} {'numpy (ms)':>12} {'speedup':>8}")
    for n_x, n_k in ((50, 2_000), (400, 6_000), (400, 20_000), (2_000, 20_000)):
        x = rng.uniform(-1, 1, n_x)
        k = rng.uniform(-100, 100, n_k) + 1j * rng.uniform(-30, 0, n_k)
        c = (rng.standard_normal(n_k) + 1j * rng.standard_normal(n_k)) * np.exp(
            -np.abs(k) ** 2 / 4e3
        )
        t_active = timeit(phase_sum, x, k, c, repeats=args.repeats)
        t_numpy = timeit(phase_sum_numpy, x, k, c, repeats=args.repeats)
        print(
            f"{n_x:>6} {n_k:>7} {t_active * 1e3:>12.2f} {t_numpy * 1e3:>12.2f} "
            f"{t_numpy / t_active:>8.2f}x"
        )


if __name__ == "__main__":
    main()
