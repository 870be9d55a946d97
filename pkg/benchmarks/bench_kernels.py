#!/usr/bin/env python3
"""Benchmark the pure-Python kernel backend against the compiled one.

Times the two hot kernels (the curvature-comparison sweep and pairwise
distance matrices) on each model surface and prints a speedup table.

Usage: python benchmarks/bench_kernels.py [--samples N] [--pairwise N]
"""

import argparse
import math
import time

import numpy as np

from alexot import spaces
from alexot._kernels import pure

try:
    from alexot._kernels import _fast as fast
except ImportError:
    fast = None


def time_call(fn, *args, repeats=3):
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_comparison(space, k, n, seed=0):
    kind, param = spaces.kind_code(space), spaces.space_param(space)
    region = spaces.default_region(space)
    seeds = np.random.SeedSequence(seed).spawn(4)
    p = spaces.pad3(spaces.sample_region(space, region, n, seeds[0]))
    x = spaces.pad3(spaces.sample_region(space, region, n, seeds[1]))
    y = spaces.pad3(spaces.sample_region(space, region, n, seeds[2]))
    t_fixed = np.arange(1, 10) * 0.1
    t_rand = np.random.default_rng(seeds[3]).random((n, 2))
    args = (kind, param, k, p, x, y, t_fixed, t_rand)
    rows = []
    t_pure, out_pure = time_call(pure.comparison_scan, *args)
    rows.append(("pure", t_pure, out_pure[0]))
    if fast is not None:
        t_fast, out_fast = time_call(fast.comparison_scan, *args)
        rows.append(("fast", t_fast, out_fast[0]))
        if abs(out_fast[0] - out_pure[0]) > 1e-9:
            raise RuntimeError("backends disagree on min slack")
    return rows


def bench_pairwise(space, n, seed=0):
    kind, param = spaces.kind_code(space), spaces.space_param(space)
    region = spaces.default_region(space)
    seeds = np.random.SeedSequence(seed).spawn(2)
    a = spaces.pad3(spaces.sample_region(space, region, n, seeds[0]))
    b = spaces.pad3(spaces.sample_region(space, region, n, seeds[1]))
    rows = []
    t_pure, out_pure = time_call(pure.pairwise_distances, kind, param, a, b)
    rows.append(("pure", t_pure, float(out_pure.sum())))
    if fast is not None:
        t_fast, out_fast = time_call(fast.pairwise_distances, kind, param, a, b)
        rows.append(("fast", t_fast, float(out_fast.sum())))
        if np.abs(out_fast - out_pure).max() > 1e-9:
            raise RuntimeError("backends disagree on distances")
    return rows


def print_block(title, rows):
    print(f"\n{title}")
    base = rows[0][1]
    for name, elapsed, checksum in rows:
        speedup = base / elapsed if elapsed > 0 else math.inf
        print(f"  {name:5s}  {elapsed * 1e3:10.2f} ms   x{speedup:6.1f}   (check {checksum:+.6e})")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=20_000,
                    help="comparison-sweep quadruples per space")
    ap.add_argument("--pairwise", type=int, default=700,
                    help="points per side of the distance matrix")
    args = ap.parse_args()

    if fast is None:
        print("compiled kernels unavailable; timing the pure backend only")

    cases = [
        ("plane, k=0", spaces.plane(), 0.0),
        ("sphere, k=1", spaces.sphere(1.0), 1.0),
        ("cone(3*pi/2), k=0", spaces.cone(1.5 * math.pi), 0.0),
        ("cone(3*pi), k=0", spaces.cone(3.0 * math.pi), 0.0),
    ]
    print(f"comparison sweep: {args.samples} quadruples, 11 t-values each")
    for title, space, k in cases:
        print_block(title, bench_comparison(space, k, args.samples))

    print(f"\npairwise distances: {args.pairwise} x {args.pairwise}")
    for title, space, _ in cases[:3]:
        print_block(title, bench_pairwise(space, args.pairwise))


if __name__ == "__main__":
    main()
