#!/usr/bin/env python3
"""Timing comparison: compiled kernels vs the numpy fallback.

Runs each kernel on sizes typical for survey microdata work and prints
a table of per-call times and speedups.  Usage:

    python3 benchmarks/bench_kernels.py [--repeat 7] [--rows 800000]
"""

import argparse
import importlib
import statistics
import time

import numpy as np


def load_backends():
    pyfallback = importlib.import_module("gapdecomp._kernels.pyfallback")
    try:
        core = importlib.import_module("gapdecomp._kernels._core")
    except ImportError:
        core = None
    return pyfallback, core


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times), statistics.median(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=7)
    parser.add_argument("--rows", type=int, default=800_000)
    parser.add_argument("--path-rows", type=int, default=60_000)
    parser.add_argument("--path-vars", type=int, default=9)
    args = parser.parse_args()

    pyfallback, core = load_backends()
    if core is None:
        print("compiled extension not importable; timing the fallback only")

    rng = np.random.default_rng(7)
    eta = rng.normal(scale=3.0, size=args.rows)
    y = (rng.random(args.rows) < 0.3).astype(np.float64)
    eta0 = rng.normal(scale=2.0, size=args.path_rows)
    deltas = rng.normal(scale=0.5, size=(args.path_rows, args.path_vars))
    order = rng.permutation(args.path_vars)

    cases = [
        (f"logistic (n={args.rows:,})", lambda mod: mod.logistic(eta)),
        (f"bernoulli_loglik (n={args.rows:,})", lambda mod: mod.bernoulli_loglik(eta, y)),
        (
            f"path_means (n={args.path_rows:,}, k={args.path_vars})",
            lambda mod: mod.path_means(eta0, deltas, order),
        ),
    ]

    header = f"{'kernel':<36} {'python':>12} {'cython':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call in cases:
        py_best, _ = best_of(lambda: call(pyfallback), args.repeat)
        if core is not None:
            cy_best, _ = best_of(lambda: call(core), args.repeat)
            # sanity: both routes must produce the same numbers
            np.testing.assert_allclose(
                np.atleast_1d(call(pyfallback)),
                np.atleast_1d(call(core)),
                rtol=1e-12,
                atol=1e-15,
            )
            print(
                f"{name:<36} {py_best * 1e3:>10.2f}ms {cy_best * 1e3:>10.2f}ms "
                f"{py_best / cy_best:>8.2f}x"
            )
        else:
            print(f"{name:<36} {py_best * 1e3:>10.2f}ms {'—':>12} {'—':>9}")


if __name__ == "__main__":
    main()
