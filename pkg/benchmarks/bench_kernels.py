#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the pure-Python fallback.

The three workloads are the hot loops that dominate real runs: storing a
long orbit, converging to the interior fixed point, and scanning many
states for short periods.  Outputs are checked to be bit-identical across
backends before any timing is reported.

Usage: python benchmarks/bench_kernels.py [--steps N] [--repeat K]
"""

import argparse
import math
import time

import numpy as np

from toppmap.kernels import available_backends
from toppmap.repro import FIG2_PARAMS

ARGS = FIG2_PARAMS.as_args()
START = (0.5, 0.18, 0.016)
TARGETS = np.array([[2 / 3, 0.0, 0.0], [0.5, 1 / 12, 3 / 200]])


def bench_iterate(mod, steps):
    out = np.empty((steps + 1, 3))
    t0 = time.perf_counter()
    neg = mod.iterate_into(*ARGS, *START, out)
    elapsed = time.perf_counter() - t0
    assert neg == -1
    return elapsed, out


def bench_converge(mod, _steps):
    t0 = time.perf_counter()
    result = mod.converge(*ARGS, *START, TARGETS, 2 / 3, 3 / 200, 1e-4, 10**6)
    elapsed = time.perf_counter() - t0
    return elapsed, tuple(result)


def bench_period_scan(mod, _steps):
    rng = np.random.default_rng(99)
    states = rng.uniform([0.1, 0.0, 0.0], [1.5, 1.41, 0.14], (2000, 3))
    t0 = time.perf_counter()
    periods = [mod.period_scan(*ARGS, *s, 64, 1e-10) for s in states]
    elapsed = time.perf_counter() - t0
    return elapsed, periods


WORKLOADS = [
    ("iterate_into", bench_iterate),
    ("converge", bench_converge),
    ("period_scan x2000", bench_period_scan),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=10**6,
                        help="orbit length for iterate_into (default 1e6)")
    parser.add_argument("--repeat", type=int, default=3,
                        help="timed repetitions, best is reported (default 3)")
    ns = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")

    best: dict = {}
    payloads: dict = {}
    for wname, fn in WORKLOADS:
        for bname, mod in backends.items():
            times = []
            for _ in range(ns.repeat):
                elapsed, payload = fn(mod, ns.steps)
                times.append(elapsed)
            best[wname, bname] = min(times)
            payloads[wname, bname] = payload

        if len(backends) == 2:
            a = payloads[wname, "compiled"]
            b = payloads[wname, "pure"]
            if isinstance(a, np.ndarray):
                assert (a == b).all(), f"{wname}: backend outputs differ"
            else:
                assert a == b or list(a) == list(b), f"{wname}: outputs differ"

    width = max(len(w) for w, _ in WORKLOADS)
    header = f"{'workload':<{width}}  " + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for wname, _ in WORKLOADS:
        row = f"{wname:<{width}}  "
        for bname in backends:
            row += f"{best[wname, bname] * 1e3:>10.2f}ms"
        if len(backends) == 2:
            ratio = best[wname, "pure"] / best[wname, "compiled"]
            row += f"{ratio:>9.1f}x"
        print(row)
    if len(backends) == 2:
        print("outputs bit-identical across backends")
    else:
        print("compiled backend not built; run pip install -e . first")


if __name__ == "__main__":
    main()
