#!/usr/bin/env python3
"""Benchmark the JIT solver kernels against the pure-Python fallback.

Times optimal_cost and exhaustive_oracle on both backends and prints a
table.  Generated diagonal instances collapse to tiny state graphs under
the canonical reductions, so the solver rows also include seeded random
instances whose buffered-choice branching is what actually stresses the
search.  The numba warm-up (compilation or cache load) is reported
separately, not folded into the medians.

Usage:
    python benchmarks/bench_solver.py [--repeat 3]
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from rbline._accel import HAVE_NUMBA
from rbline.core import GENERIC, Instance, Meta, Request
from rbline.genesis import build_instance, scale_packets
from rbline.optsolve import SolveLimits, exhaustive_oracle, optimal_cost

LIMITS = SolveLimits(max_states=30_000_000, max_seconds=900.0)


def random_instance(n_requests: int, n_sites: int, seed: int) -> Instance:
    rng = random.Random(seed)
    arrivals = tuple(
        Request(i, rng.randrange(n_sites), 0, GENERIC) for i in range(n_requests)
    )
    return Instance(n_sites=n_sites, arrivals=arrivals, meta=Meta())


def _time(fn, repeat):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        samples.append(time.perf_counter() - t0)
    return result, statistics.median(samples)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = ["python"] + (["numba"] if HAVE_NUMBA else [])
    if not HAVE_NUMBA:
        print("numba unavailable or disabled (RBLINE_NO_NUMBA); python rows only\n")

    solver_cases = [
        ("solve generated ell=3 P=2 cap=3", build_instance(3, 2, 1), 3),
        ("solve generated ell=2 beta=3 cap=6", scale_packets(build_instance(2, 1, 1), 3), 6),
        ("solve random n=40 sites=12 cap=5", random_instance(40, 12, 1), 5),
        ("solve random n=50 sites=12 cap=6", random_instance(50, 12, 2), 6),
    ]
    oracle_cases = [
        ("oracle ell=2 prefix=11 cap=3", build_instance(2, 1, 1), 11, 3),
    ]

    if HAVE_NUMBA:
        t0 = time.perf_counter()
        optimal_cost(build_instance(1, 1, 1), 1, backend="numba")
        exhaustive_oracle(build_instance(1, 1, 1), 1, backend="numba")
        print(f"numba warm-up (compile or cache load): {time.perf_counter() - t0:.2f}s\n")

    width = max(len(name) for name, *_ in solver_cases + oracle_cases)
    header = f"{'case':<{width}}  {'backend':<7}  {'median':>10}  cost"
    print(header)
    print("-" * len(header))

    for name, inst, cap in solver_cases:
        for backend in backends:
            (report, _), sec = _time(
                lambda: optimal_cost(inst, cap, limits=LIMITS, backend=backend), args.repeat
            )
            print(f"{name:<{width}}  {backend:<7}  {sec * 1e3:9.1f}ms  {report.total_cost}")
    for name, inst, k, cap in oracle_cases:
        prefix = Instance(n_sites=inst.n_sites, arrivals=inst.arrivals[:k], meta=Meta())
        for backend in backends:
            cost, sec = _time(
                lambda: exhaustive_oracle(prefix, cap, backend=backend), max(1, args.repeat // 2)
            )
            print(f"{name:<{width}}  {backend:<7}  {sec * 1e3:9.1f}ms  {cost}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
