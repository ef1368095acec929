"""Acceptance gate: the ten binding criteria for this package.

Each test is one criterion, asserted at its stated tolerance, and
prints a single ``criterion N PASS`` line with the measured numbers
(visible with ``pytest -s`` or on failure).  Tolerances and runtime
bounds are part of the contract, not implementation detail: do not
loosen them.
"""

import itertools
import json
import time

import numpy as np

from dtasim import (
    PolicyKind,
    RangeSpec,
    ResourcePool,
    Scenario,
    TraceModel,
    TrafficClass,
    TrafficKind,
    allocate_dynamic,
    allocate_static,
    compare_policies,
    dynamic_breakdown,
    load_default_scenario,
    objective,
    optimal_reference,
    qos_score,
    run,
    sweep1d,
    trace_arrays,
)
from dtasim.cli import main as cli_main
from dtasim.rng import Stream
from dtasim.sweep import AxisTarget, SweepAxis

from conftest import make_class, make_obs, make_symmetric

# frozen golden: dynamic minus static mean objective on the default
# scenario (criterion 7), recorded from the first verified computation
GOLDEN_OBJECTIVE_MARGIN = 0.0016158046208587518

# frozen threshold: throughput coefficient of variation over the final
# 50 epochs of the default dynamic run (criterion 9)
PLATEAU_CV_THRESHOLD = 0.05


def test_criterion_01_qos_exactness():
    cls = make_class(demanded_bandwidth=10.0, max_latency=50.0, max_jitter=5.0)
    obs = make_obs(
        offered_bandwidth=10.0, latency=30.0, jitter=2.0, packet_loss=0.0
    )
    value = qos_score(obs, cls)
    expected = 25.0 / 6.0
    assert abs(value - expected) / expected < 1e-12

    bounds_met = qos_score(
        make_obs(offered_bandwidth=10.0, latency=50.0, jitter=5.0, packet_loss=0.0),
        cls,
    )
    assert bounds_met == 1.0
    print(f"criterion 1 PASS: qos {value!r} vs 25/6, bounds-met {bounds_met}")


def test_criterion_02_qos_monotonicity():
    started = time.perf_counter()
    cases = (
        ("offered_bandwidth", 0.1, 50.0, 1),
        ("latency", 1.0, 200.0, -1),
        ("jitter", 0.1, 50.0, -1),
        ("packet_loss", 0.0, 0.9, -1),
    )
    cls = make_class()
    pairs_per_field = 2500
    checked = 0
    for field_index, (field, lo_bound, hi_bound, direction) in enumerate(cases):
        stream = Stream(24601, field_index)
        for _ in range(pairs_per_field):
            base = dict(
                offered_bandwidth=stream.uniform_in(0.1, 50.0),
                latency=stream.uniform_in(1.0, 200.0),
                jitter=stream.uniform_in(0.1, 50.0),
                packet_loss=stream.uniform_in(0.0, 0.9),
            )
            v1 = stream.uniform_in(lo_bound, hi_bound)
            v2 = stream.uniform_in(lo_bound, hi_bound)
            lo, hi = sorted((v1, v2))
            assert lo < hi  # continuous draws never tie
            a = qos_score(make_obs(**{**base, field: lo}), cls)
            b = qos_score(make_obs(**{**base, field: hi}), cls)
            if direction > 0:
                assert a < b, (field, lo, hi)
            else:
                assert a > b, (field, lo, hi)
            checked += 1
    elapsed = time.perf_counter() - started
    assert checked == 10_000
    assert elapsed < 1.0
    print(f"criterion 2 PASS: {checked} strict pairs in {elapsed:.3f}s")


def test_criterion_03_symmetry_collapse():
    worst = 0.0
    for n in range(1, 9):
        classes, observations, pool = make_symmetric(n, pool_total=50.0)
        dynamic = allocate_dynamic(classes, observations, pool).alloc
        static = allocate_static(pool)
        for d, s in zip(dynamic, static):
            worst = max(worst, abs(d - s))
            assert abs(d - s) <= 1e-9
    print(f"criterion 3 PASS: N=1..8 worst |dynamic-static| = {worst:.3e}")


def test_criterion_04_two_class_hand_example():
    classes = [
        make_class(id=0, priority=0.6, latency_sensitivity=3.0, demanded_bandwidth=5.0),
        make_class(id=1, priority=0.4, latency_sensitivity=1.0, demanded_bandwidth=5.0),
    ]
    observations = [
        make_obs(class_id=0, offered_bandwidth=10.0, demand=10.0, load=0.2),
        make_obs(class_id=1, offered_bandwidth=10.0, demand=10.0, load=0.6),
    ]
    pool = ResourcePool(total=20.0, n_classes=2)
    qos = [qos_score(o, c) for o, c in zip(observations, classes)]
    raw = [b.raw for b in dynamic_breakdown(classes, observations, qos, pool)]
    assert abs(raw[0] - 11.5) <= 1e-9
    assert abs(raw[1] - 10.1666667) <= 1e-7

    alloc = allocate_dynamic(classes, observations, pool).alloc
    assert abs(alloc[0] - 10.6153846) <= 1e-6
    assert abs(alloc[1] - 9.3846154) <= 1e-6
    print(f"criterion 4 PASS: raw {raw}, projected {list(alloc)}")


def _random_scenario(k: int) -> Scenario:
    s = Stream(987654321, k)
    n = 1 + int(s.uniform() * 6.0)
    model = (
        TraceModel.CONSTANT,
        TraceModel.UNIFORM_SAMPLE,
        TraceModel.BOUNDED_WALK,
    )[int(s.uniform() * 3.0)]

    def span(lo_lo, lo_hi, width):
        lo = s.uniform_in(lo_lo, lo_hi)
        return RangeSpec(lo, lo + s.uniform() * width, 2)

    loss_lo = s.uniform() * 0.4
    ranges = {
        "bandwidth": span(0.05, 20.0, 30.0),
        "latency": span(1.0, 50.0, 100.0),
        "jitter": span(0.05, 5.0, 10.0),
        "packet_loss": RangeSpec(loss_lo, min(0.9, loss_lo + s.uniform() * 0.4), 2),
        "demand": span(0.5, 10.0, 20.0),
    }
    classes = tuple(
        TrafficClass(
            id=i,
            name=f"c{i}",
            kind=TrafficKind.CUSTOM,
            priority=s.uniform_in(0.05, 1.0),
            demanded_bandwidth=s.uniform_in(0.1, 12.0),
            latency_sensitivity=s.uniform_in(0.1, 5.0),
            max_latency=s.uniform_in(10.0, 200.0),
            max_jitter=s.uniform_in(0.5, 20.0),
            max_packet_loss=s.uniform_in(0.01, 0.9),
        )
        for i in range(n)
    )
    return Scenario(
        classes=classes,
        pool_total=s.uniform_in(0.5, 100.0),
        epochs=50,
        seed=s.next_u64() >> 1,
        trace_model=model,
        ranges=ranges,
        initial_load=tuple(s.uniform_in(0.0, 0.95) for _ in range(n)),
        walk_step_fraction=s.uniform_in(0.01, 0.5),
    )


def test_criterion_05_feasibility_under_every_policy():
    started = time.perf_counter()
    epochs_checked = 0
    for k in range(1000):
        scenario = _random_scenario(k)
        trace = trace_arrays(scenario)
        for policy in PolicyKind:
            result = run(scenario, policy, trace=trace)
            assert (result.alloc >= 0.0).all(), (k, policy)
            totals = result.alloc.sum(axis=1)
            assert (totals <= scenario.pool_total + 1e-9).all(), (k, policy)
            epochs_checked += result.epochs
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    print(
        f"criterion 5 PASS: 1000 scenarios x 4 policies, "
        f"{epochs_checked} epochs feasible in {elapsed:.2f}s"
    )


def _brute_force_best(classes, observations, pool_total):
    # independent oracle: exhaustive search on a 0.1-granularity grid
    grids = []
    for cls, obs in zip(classes, observations):
        steps = int(round((obs.demand - cls.demanded_bandwidth) * 10))
        grids.append(
            [cls.demanded_bandwidth + 0.1 * j for j in range(steps + 1)]
        )
    rates = [c.priority / o.demand for c, o in zip(classes, observations)]
    best = -1.0
    for point in itertools.product(*grids):
        total = 0.0
        for a in point:
            total += a
        if total > pool_total + 1e-9:
            continue
        value = 0.0
        for rate, a in zip(rates, point):
            value += rate * a
        if value > best:
            best = value
    return best


def test_criterion_06_oracle_equivalence():
    started = time.perf_counter()
    worst_gap = 0.0
    for k in range(100):
        s = Stream(1618033988, k)
        n = 1 + int(s.uniform() * 3.0)
        classes = []
        observations = []
        for i in range(n):
            bdem = round(s.uniform_in(0.5, 2.0), 1)
            demand = round(bdem + s.uniform_in(0.5, 2.5), 1)
            classes.append(make_class(id=i, priority=s.uniform_in(0.05, 1.0),
                                      demanded_bandwidth=bdem))
            observations.append(make_obs(class_id=i, demand=demand))
        sum_lower = sum(c.demanded_bandwidth for c in classes)
        sum_upper = sum(o.demand for o in observations)
        pool_total = sum_lower + s.uniform() * (sum_upper - sum_lower) * 1.2
        pool = ResourcePool(total=pool_total, n_classes=n)

        opt = objective(
            optimal_reference(classes, observations, pool), observations, classes
        )
        brute = _brute_force_best(classes, observations, pool_total)
        step_increment = 0.1 * max(
            c.priority / o.demand for c, o in zip(classes, observations)
        )
        assert brute <= opt + 1e-9, k
        gap = opt - brute
        worst_gap = max(worst_gap, gap)
        assert gap <= step_increment + 1e-9, k
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    print(
        f"criterion 6 PASS: 100 instances, worst grid gap {worst_gap:.3e} "
        f"in {elapsed:.2f}s"
    )


def test_criterion_07_dynamic_beats_static_golden_margin():
    started = time.perf_counter()
    scenario = load_default_scenario()
    comparison = compare_policies(
        scenario, (PolicyKind.STATIC, PolicyKind.DYNAMIC)
    )
    static, dynamic = comparison.results
    margin = dynamic.mean_objective - static.mean_objective
    assert margin > 0.0
    assert abs(margin - GOLDEN_OBJECTIVE_MARGIN) < 1e-12
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    print(
        f"criterion 7 PASS: objective margin {margin!r} "
        f"(golden {GOLDEN_OBJECTIVE_MARGIN!r}) in {elapsed:.2f}s"
    )


def test_criterion_08_figure_direction_suite():
    started = time.perf_counter()
    scenario = load_default_scenario()
    directions = (
        (AxisTarget.PACKET_LOSS, -1),
        (AxisTarget.JITTER, -1),
        (AxisTarget.LATENCY, -1),
        (AxisTarget.OFFERED_BANDWIDTH, 1),
    )
    for target, direction in directions:
        axis = SweepAxis(target=target, range=scenario.ranges[target.value])
        table = sweep1d(scenario, axis, PolicyKind.DYNAMIC)
        eff = table.column("effective_throughput")
        for a, b in zip(eff, eff[1:]):
            if direction < 0:
                assert b <= a + 1e-12, target
            else:
                assert b >= a - 1e-12, target
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    print(
        "criterion 8 PASS: effective throughput monotone along "
        f"packet_loss/jitter/latency/bandwidth axes in {elapsed:.2f}s"
    )


def test_criterion_09_plateau_shape():
    started = time.perf_counter()
    scenario = load_default_scenario()
    result = run(scenario, PolicyKind.DYNAMIC)
    tail = np.asarray(result.throughput[-50:], dtype=np.float64)
    mean = float(tail.mean())
    assert mean > 0.0
    cv = float(tail.std()) / mean
    assert cv < PLATEAU_CV_THRESHOLD
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    print(
        f"criterion 9 PASS: plateau CV {cv!r} < {PLATEAU_CV_THRESHOLD} "
        f"in {elapsed:.2f}s"
    )


def test_criterion_10_compare_determinism(tmp_path, capsys):
    started = time.perf_counter()
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    argv = ["compare", "default", "--policies", "static,dynamic", "--seed", "42"]
    assert cli_main(argv + ["--out", str(out_a)]) == 0
    assert cli_main(argv + ["--out", str(out_b)]) == 0
    capsys.readouterr()
    names_a = sorted(p.name for p in out_a.iterdir())
    names_b = sorted(p.name for p in out_b.iterdir())
    assert names_a == names_b and names_a
    for name in names_a:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name
    manifest = json.loads((out_a / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["seed"] == 42
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    print(
        f"criterion 10 PASS: {len(names_a)} artifacts byte-identical "
        f"across reruns in {elapsed:.2f}s"
    )
