#!/usr/bin/env python3
"""Benchmark the clustering kernels: compiled extension vs numpy fallback.

Usage: python benchmarks/bench_kernels.py [--quick]

Both backends implement identical arithmetic; this measures the wall-clock
gap on the two hot loops (spherical k-means Lloyd iterations and the
average-linkage merge loop) at a few problem sizes and verifies the
backends agree on every run.
"""

import argparse
import sys
import time

import numpy as np

from ontopop._kernels import available_backends, get_backend


def unit_rows(rng, n, dim):
    rows = rng.standard_normal((n, dim))
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def time_call(fn, *args, repeats=3):
    best = np.inf
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_lloyd(backends, rng, n, dim, k):
    points = unit_rows(rng, n, dim)
    init = points[rng.choice(n, size=k, replace=False)].copy()
    timings = {}
    labels = {}
    for name, impl in backends.items():
        timings[name], (labels[name], _) = time_call(impl.lloyd, points, init, 300)
    return timings, labels


def bench_linkage(backends, rng, n, dim, k):
    points = unit_rows(rng, n, dim)
    dist = 1.0 - points @ points.T
    timings = {}
    labels = {}
    for name, impl in backends.items():
        timings[name], labels[name] = time_call(impl.average_linkage, dist, k)
    return timings, labels


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="small sizes only")
    args = parser.parse_args(argv)

    names = available_backends()
    if "native" not in names:
        print(
            "native kernel extension is not built "
            "(run `python setup.py build_ext --inplace`); nothing to compare"
        )
        return 1
    backends = {name: get_backend(name) for name in names}
    rng = np.random.default_rng(0)

    lloyd_sizes = [(2_000, 64, 20), (8_000, 128, 40)]
    linkage_sizes = [(400, 32, 8), (1_200, 32, 12)]
    if args.quick:
        lloyd_sizes = lloyd_sizes[:1]
        linkage_sizes = linkage_sizes[:1]

    header = f"{'kernel':<18} {'size':<22} " + " ".join(f"{n:>10}" for n in names) + f" {'speedup':>8}"
    print(header)
    print("-" * len(header))
    mismatches = 0
    for n, dim, k in lloyd_sizes:
        timings, labels = bench_lloyd(backends, rng, n, dim, k)
        if not np.array_equal(labels["numpy"], labels["native"]):
            mismatches += 1
        row = " ".join(f"{timings[name] * 1e3:>8.1f}ms" for name in names)
        print(f"{'lloyd':<18} {f'n={n} d={dim} k={k}':<22} {row} {timings['numpy'] / timings['native']:>7.1f}x")
    for n, dim, k in linkage_sizes:
        timings, labels = bench_linkage(backends, rng, n, dim, k)
        if not np.array_equal(labels["numpy"], labels["native"]):
            mismatches += 1
        row = " ".join(f"{timings[name] * 1e3:>8.1f}ms" for name in names)
        print(f"{'average_linkage':<18} {f'n={n} d={dim} k={k}':<22} {row} {timings['numpy'] / timings['native']:>7.1f}x")
    if mismatches:
        print(f"\nWARNING: backends disagreed on {mismatches} run(s)")
        return 1
    print("\nbackends agreed on every run")
    return 0


if __name__ == "__main__":
    sys.exit(main())
