"""Benchmark the hot kernels: numba @njit loops vs the pure-numpy fallback.

Runs every kernel on a realistic workload with both backends, verifies the
outputs agree bit-for-bit, and prints a timing table.  Usage:

    python benchmarks/bench_kernels.py [--bits 4194304] [--repeat 5]
"""

import argparse
import time

import numpy as np

from bitlaws import _kernels as K


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--bits", type=int, default=1 << 22)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if not K.HAVE_NUMBA:
        print("numba is not importable; nothing to compare")
        return

    from numba import njit

    n = args.bits
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, n, dtype=np.int64).astype(np.uint8)
    sums = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(bits, out=sums[1:])
    bounds = np.array(
        [1 << r for r in range(2, n.bit_length()) if (1 << (r + 1)) <= n]
        + [n],
        dtype=np.int64,
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        ns = np.arange(1, n + 1, dtype=np.float64)
        thresholds = 2.0 * 2.0 * np.sqrt((ns / 2.0) * np.log(np.log(ns)))
    thresholds[:2] = np.inf

    cases = {
        "mix_words": (
            lambda fn: fn(np.uint64(42), n // 64),
            K._mix_words_numpy,
            K._mix_words_loop,
        ),
        "pattern_counts": (
            lambda fn: fn(bits, 3, 1),
            K._pattern_counts_numpy,
            K._pattern_counts_loop,
        ),
        "slln_violations": (
            lambda fn: fn(sums, np.int64(8), np.int64(223)),
            K._slln_violations_numpy,
            K._slln_violations_loop,
        ),
        "segment_max_walk": (
            lambda fn: fn(sums, bounds),
            K._segment_max_walk_numpy,
            K._segment_max_walk_loop,
        ),
        "first_crossing": (
            lambda fn: fn(sums, thresholds, np.int64(1024)),
            K._first_crossing_numpy,
            K._first_crossing_loop,
        ),
    }

    print(f"workload: {n} bits, best of {args.repeat} runs")
    print(f"{'kernel':<18} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>9}")
    for name, (call, np_fn, loop_fn) in cases.items():
        jit_fn = njit(cache=True)(loop_fn)
        out_np = call(np_fn)
        out_nb = call(jit_fn)  # also compiles
        assert np.array_equal(np.asarray(out_np), np.asarray(out_nb)), name
        t_np = best_of(lambda: call(np_fn), args.repeat)
        t_nb = best_of(lambda: call(jit_fn), args.repeat)
        print(
            f"{name:<18} {t_np * 1e3:>12.3f} {t_nb * 1e3:>12.3f} "
            f"{t_np / t_nb:>8.2f}x"
        )
    print("outputs verified identical across backends")


if __name__ == "__main__":
    main()
