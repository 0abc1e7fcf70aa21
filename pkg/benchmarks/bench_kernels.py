#!/usr/bin/env python3
"""Benchmark the compiled pivot-counting kernel against the numpy fallback.

Both backends share the same counter-based randomness, so their outputs are
bit-identical; this script verifies that while timing a grid of validator-set
sizes and sample counts.

    python benchmarks/bench_kernels.py [--samples N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from destake._kernels import pivot_counts_c, pivot_counts_py


def bench(fn, weights, threshold, samples, seed, repeats=3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(weights, threshold, True, samples, seed)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=100_000)
    args = parser.parse_args()

    if pivot_counts_c is None:
        print("compiled kernel not built; run 'python setup.py build_ext --inplace'")
        print("timing the numpy fallback only\n")

    rng = np.random.default_rng(0)
    print(f"{'m':>5} {'samples':>9} {'numpy':>10} {'compiled':>10} {'speedup':>8}  identical")
    for m in (10, 50, 200, 500):
        weights = rng.pareto(1.16, m) * 1e6 + 10.0
        threshold = weights.sum() / 3.0
        t_py = bench(pivot_counts_py, weights, threshold, args.samples, seed=42)
        row = f"{m:>5} {args.samples:>9} {t_py:>9.3f}s"
        if pivot_counts_c is not None:
            t_c = bench(pivot_counts_c, weights, threshold, args.samples, seed=42)
            same = np.array_equal(
                pivot_counts_py(weights, threshold, True, args.samples, 42),
                pivot_counts_c(weights, threshold, True, args.samples, 42),
            )
            row += f" {t_c:>9.3f}s {t_py / t_c:>7.1f}x  {same}"
        print(row)


if __name__ == "__main__":
    main()
