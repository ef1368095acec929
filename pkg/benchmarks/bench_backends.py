#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times trace generation and full policy runs on the bundled default
scenario at several sizes, prints a table, and verifies on the way
that both backends produce bit-identical output.

Usage: python3 benchmarks/bench_backends.py [--epochs N] [--repeats K]
"""

import argparse
import dataclasses
import statistics
import sys
import time

import numpy as np

from dtasim import PolicyKind, load_default_scenario
from dtasim import _pykernels
from dtasim.scenario import ATTRIBUTES

try:
    from dtasim import _kernels as _ckernels
except ImportError:
    _ckernels = None


def class_arrays(scenario):
    classes = scenario.classes
    return (
        np.array([c.priority for c in classes]),
        np.array([c.demanded_bandwidth for c in classes]),
        np.array([c.latency_sensitivity for c in classes]),
        np.array([c.max_latency for c in classes]),
        np.array([c.max_jitter for c in classes]),
        np.array([c.max_packet_loss for c in classes]),
    )


def time_call(fn, repeats):
    samples = []
    for _ in range(repeats):
        started = time.perf_counter()
        result = fn()
        samples.append(time.perf_counter() - started)
    return result, min(samples), statistics.median(samples)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--epochs", type=int, default=5000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)

    if _ckernels is None:
        print("compiled backend is not built; nothing to compare", file=sys.stderr)
        return 1

    scenario = dataclasses.replace(load_default_scenario(), epochs=args.epochs)
    mins = [scenario.ranges[a].min for a in ATTRIBUTES]
    maxs = [scenario.ranges[a].max for a in ATTRIBUTES]
    arrays = class_arrays(scenario)
    load0 = np.array(scenario.initial_load)

    print(f"default scenario, {scenario.n_classes} classes, "
          f"{args.epochs} epochs, best of {args.repeats}")
    print()
    print(f"{'stage':<28} {'python':>12} {'compiled':>12} {'speedup':>9}")

    def trace_with(kernels):
        return kernels.generate_trace(
            scenario.seed, scenario.epochs, scenario.n_classes,
            kernels.MODEL_UNIFORM, mins, maxs, scenario.walk_step_fraction,
        )

    py_trace, py_best, _ = time_call(lambda: trace_with(_pykernels), args.repeats)
    c_trace, c_best, _ = time_call(lambda: trace_with(_ckernels), args.repeats)
    assert np.array_equal(py_trace, c_trace), "trace mismatch between backends"
    print(f"{'generate_trace':<28} {py_best * 1e3:>10.2f}ms {c_best * 1e3:>10.2f}ms "
          f"{py_best / c_best:>8.1f}x")

    policies = [
        ("run static", _pykernels.POLICY_STATIC),
        ("run loadbalance", _pykernels.POLICY_LOAD_BALANCE),
        ("run dynamic", _pykernels.POLICY_DYNAMIC),
        ("run optimal", _pykernels.POLICY_OPTIMAL),
    ]
    for label, policy in policies:
        py_out, py_best, _ = time_call(
            lambda: _pykernels.run_series(
                py_trace, *arrays, scenario.pool_total, policy, load0
            ),
            args.repeats,
        )
        c_out, c_best, _ = time_call(
            lambda: _ckernels.run_series(
                c_trace, *arrays, scenario.pool_total, policy, load0
            ),
            args.repeats,
        )
        for key, value in py_out.items():
            assert np.array_equal(value, c_out[key]), f"{label}: {key} mismatch"
        print(f"{label:<28} {py_best * 1e3:>10.2f}ms {c_best * 1e3:>10.2f}ms "
              f"{py_best / c_best:>8.1f}x")

    print()
    print("all outputs bit-identical between backends")
    return 0


if __name__ == "__main__":
    sys.exit(main())
