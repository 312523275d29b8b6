#!/usr/bin/env python3
"""Benchmark the compiled kernels against their pure-numpy fallbacks.

Runs the three hot kernels (window digit decoding, block occurrence
masking, truncated orbit evaluation) both ways on the same inputs and
prints a timing table. The numba path needs one warm-up call per kernel
to absorb JIT compilation; that call is excluded from the timings.

Usage:
    python benchmarks/bench_kernels.py [--size 2000000] [--repeat 5]

To benchmark on a machine without numba (or with it disabled), set
CANTORNORMAL_DISABLE_NUMBA=1; only the numpy column will be reported.
"""

import argparse
import time

import numpy as np

from cantornormal import ConstantSequence, PresetSequence, generate_digits
from cantornormal.kernels import HAVE_NUMBA, match_mask, orbit_numbers, region_digits
from cantornormal.ladder import PartitionIndex


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=2_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    seq = PresetSequence("iterated-log")
    pi = PartitionIndex(seq)
    # find the region enclosing `size` and benchmark on its windows
    r = pi.region_of(max(args.size, 100))
    lo, hi = pi.region(r)
    nwin = min((hi - lo) // r, args.size // r)
    bases = seq.bases(lo + 1, lo + nwin * r)

    digits = generate_digits(ConstantSequence(2), args.size)
    block = np.array([0, 1, 1], dtype=np.int64)
    n = args.size - block.size + 1

    obases = ConstantSequence(2).bases(1, args.size)
    depths = np.full(args.size - 24, 24, dtype=np.int64)

    jobs = [
        (f"window digits (r={r}, {nwin} windows)",
         lambda un: region_digits(bases, r, use_numba=un)),
        (f"block mask (k=3, n={n})",
         lambda un: match_mask(digits, block, n, use_numba=un)),
        (f"orbit values (depth 24, {depths.size} points)",
         lambda un: orbit_numbers(digits, obases, depths, use_numba=un)),
    ]

    rows = []
    for name, job in jobs:
        numpy_t = timed(lambda: job(False), args.repeat)
        if HAVE_NUMBA:
            job(True)  # warm-up / JIT
            numba_t = timed(lambda: job(True), args.repeat)
            rows.append((name, numpy_t, numba_t))
        else:
            rows.append((name, numpy_t, None))

    print(f"{'kernel':52s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, numpy_t, numba_t in rows:
        if numba_t is None:
            print(f"{name:52s} {numpy_t * 1e3:9.2f}ms {'n/a':>10s}")
        else:
            print(
                f"{name:52s} {numpy_t * 1e3:9.2f}ms {numba_t * 1e3:9.2f}ms "
                f"{numpy_t / numba_t:7.2f}x"
            )
    if not HAVE_NUMBA:
        print("numba unavailable or disabled; numpy fallback timings only")


if __name__ == "__main__":
    main()
