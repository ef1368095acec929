"""Parameter sweeps over scenario attributes, with CSV emission.

A sweep pins every observation attribute at its range midpoint, then
walks one (or two) axes over a grid, overriding the targeted attribute
for all classes or a single class and evaluating the chosen policy at
each grid point.  The time axis instead runs the full simulator and
tabulates the per-epoch series.  Tables never mutate the base
scenario, and emission is a pure function of the table.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import allocator
from .allocator import PolicyKind
from .errors import ValidationError
from .model import ResourcePool, TrafficObservation
from .scenario import RangeSpec, Scenario
from .simulator import SimulationResult, run

THREADS_ENV = "DTA_SIM_THREADS"

# observation attribute targets -> TrafficObservation field
_OBS_FIELDS = {
    "bandwidth": "offered_bandwidth",
    "latency": "latency",
    "jitter": "jitter",
    "packet_loss": "packet_loss",
    "demand": "demand",
}

# class attribute targets -> TrafficClass field
_CLASS_FIELDS = {
    "demanded_bandwidth": "demanded_bandwidth",
    "latency_sensitivity": "latency_sensitivity",
    "priority": "priority",
}


class AxisTarget(enum.Enum):
    """What a sweep axis varies."""

    OFFERED_BANDWIDTH = "bandwidth"
    LATENCY = "latency"
    JITTER = "jitter"
    PACKET_LOSS = "packet_loss"
    DEMAND = "demand"
    DEMANDED_BANDWIDTH = "demanded_bandwidth"
    LATENCY_SENSITIVITY = "latency_sensitivity"
    PRIORITY = "priority"
    TIME = "time"


def default_axis_range(scenario: Scenario, target: AxisTarget) -> RangeSpec:
    """The grid used for an axis when the caller does not supply one."""
    if target.value in _OBS_FIELDS:
        return scenario.ranges[target.value]
    if target is AxisTarget.DEMANDED_BANDWIDTH:
        return scenario.ranges["bandwidth"]
    if target is AxisTarget.LATENCY_SENSITIVITY:
        return RangeSpec(0.1, 5.0, 50)
    if target is AxisTarget.PRIORITY:
        return RangeSpec(0.1, 1.0, 50)
    # TIME: only count matters (number of epochs)
    return RangeSpec(0.0, float(scenario.epochs - 1), scenario.epochs)


@dataclass(frozen=True)
class SweepAxis:
    """One swept dimension: a target, a grid, and an optional class scope.

    ``class_id`` None applies the override to every class; an id
    restricts it to that class.  For the time axis only range.count is
    meaningful (it becomes the epoch count) and class_id must be None.
    """

    target: AxisTarget
    range: RangeSpec
    class_id: int | None = None

    def __post_init__(self):
        if self.class_id is not None:
            if self.target is AxisTarget.TIME:
                raise ValidationError("time axis cannot target a single class")
            if self.class_id < 0:
                raise ValidationError("axis class_id must be >= 0")

    @property
    def column_name(self) -> str:
        if self.target is AxisTarget.TIME:
            return "epoch"
        if self.class_id is None:
            return self.target.value
        return f"{self.target.value}[{self.class_id}]"

    def grid(self) -> list[float]:
        if self.target is AxisTarget.TIME:
            return [float(e) for e in range(self.range.count)]
        return self.range.grid()


@dataclass(frozen=True)
class SweepTable:
    """Rectangular sweep output: axis columns first, then metrics.

    Row count is the product of the axis counts, rows in grid order
    (first axis outermost).  ``columns`` starts with ``axis_columns``.
    """

    columns: tuple[str, ...]
    axis_columns: tuple[str, ...]
    axis_counts: tuple[int, ...]
    rows: tuple[tuple[float, ...], ...]
    policy: PolicyKind

    def __post_init__(self):
        expected = math.prod(self.axis_counts)
        if len(self.rows) != expected:
            raise ValidationError(
                f"sweep table has {len(self.rows)} rows, expected {expected}"
            )
        if self.columns[: len(self.axis_columns)] != self.axis_columns:
            raise ValidationError("axis columns must lead the column list")
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValidationError("sweep table row width mismatch")

    @property
    def metric_columns(self) -> tuple[str, ...]:
        return self.columns[len(self.axis_columns) :]

    def column(self, name: str) -> list[float]:
        try:
            idx = self.columns.index(name)
        except ValueError:
            raise ValidationError(f"no such column: {name!r}") from None
        return [row[idx] for row in self.rows]


def _metric_names(n_classes: int) -> list[str]:
    names = ["throughput_raw", "throughput", "effective_throughput", "objective"]
    names += [f"alloc_{i}" for i in range(n_classes)]
    names += [f"qos_{i}" for i in range(n_classes)]
    return names


def _base_observations(scenario: Scenario) -> list[TrafficObservation]:
    # every attribute pinned at its range midpoint, load at initial_load
    mids = {name: spec.midpoint for name, spec in scenario.ranges.items()}
    return [
        TrafficObservation(
            class_id=i,
            offered_bandwidth=mids["bandwidth"],
            latency=mids["latency"],
            jitter=mids["jitter"],
            packet_loss=mids["packet_loss"],
            demand=mids["demand"],
            load=scenario.initial_load[i],
        )
        for i in range(scenario.n_classes)
    ]


def _check_axis(scenario: Scenario, axis: SweepAxis) -> None:
    if axis.class_id is not None and axis.class_id >= scenario.n_classes:
        raise ValidationError(
            f"axis class_id {axis.class_id} out of range "
            f"(scenario has {scenario.n_classes} classes)"
        )


def _evaluate_point(
    scenario: Scenario,
    overrides: list[tuple[SweepAxis, float]],
    policy: PolicyKind,
) -> list[float]:
    classes = list(scenario.classes)
    observations = _base_observations(scenario)
    for axis, value in overrides:
        targets = (
            range(scenario.n_classes) if axis.class_id is None else (axis.class_id,)
        )
        name = axis.target.value
        if name in _OBS_FIELDS:
            field = _OBS_FIELDS[name]
            for i in targets:
                setattr(observations[i], field, value)
        else:
            field = _CLASS_FIELDS[name]
            for i in targets:
                classes[i] = dataclasses.replace(classes[i], **{field: value})
    pool = ResourcePool(total=scenario.pool_total, n_classes=scenario.n_classes)
    report = allocator.evaluate(policy, classes, observations, pool)
    row = [
        report.throughput_raw,
        report.throughput,
        report.effective_throughput,
        report.objective,
    ]
    row.extend(report.alloc)
    row.extend(report.qos)
    return row


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    return max(1, n)


def _evaluate_grid(scenario, points, policy):
    """Evaluate grid points, preserving input order in the output."""
    threads = _thread_count()
    if threads == 1 or len(points) < 2:
        return [_evaluate_point(scenario, p, policy) for p in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda p: _evaluate_point(scenario, p, policy), points))


def series_table(result: SimulationResult) -> SweepTable:
    """A full run's per-epoch series as a sweep table (epoch axis)."""
    n = result.n_classes
    columns = ("epoch", *_metric_names(n))
    rows = []
    for e in range(result.epochs):
        row = [
            float(e),
            float(result.throughput_raw[e]),
            float(result.throughput[e]),
            float(result.effective_throughput[e]),
            float(result.objective[e]),
        ]
        row.extend(float(x) for x in result.alloc[e])
        row.extend(float(x) for x in result.qos[e])
        rows.append(tuple(row))
    return SweepTable(
        columns=columns,
        axis_columns=("epoch",),
        axis_counts=(result.epochs,),
        rows=tuple(rows),
        policy=result.policy,
    )


def sweep1d(scenario: Scenario, axis: SweepAxis, policy: PolicyKind) -> SweepTable:
    """Walk one axis and record every metric at each grid point.

    Non-time axes evaluate a single epoch at midpoint observations with
    the targeted attribute overridden; the time axis runs the full
    simulator for range.count epochs and tabulates the series.
    """
    _check_axis(scenario, axis)
    if axis.target is AxisTarget.TIME:
        timed = dataclasses.replace(scenario, epochs=axis.range.count)
        return series_table(run(timed, policy))
    grid = axis.grid()
    rows = _evaluate_grid(scenario, [[(axis, v)] for v in grid], policy)
    columns = (axis.column_name, *_metric_names(scenario.n_classes))
    return SweepTable(
        columns=columns,
        axis_columns=(axis.column_name,),
        axis_counts=(len(grid),),
        rows=tuple(
            (v, *row) for v, row in zip(grid, rows)
        ),
        policy=policy,
    )


def sweep2d(
    scenario: Scenario,
    axis_a: SweepAxis,
    axis_b: SweepAxis,
    policy: PolicyKind,
) -> SweepTable:
    """Cross-product sweep, row-major with axis_a outermost."""
    if axis_a.target is axis_b.target:
        raise ValidationError("sweep2d axes must have distinct targets")
    if AxisTarget.TIME in (axis_a.target, axis_b.target):
        raise ValidationError("time axis is not valid in a 2-D sweep")
    _check_axis(scenario, axis_a)
    _check_axis(scenario, axis_b)
    grid_a = axis_a.grid()
    grid_b = axis_b.grid()
    points = [
        [(axis_a, va), (axis_b, vb)] for va in grid_a for vb in grid_b
    ]
    rows = _evaluate_grid(scenario, points, policy)
    columns = (
        axis_a.column_name,
        axis_b.column_name,
        *_metric_names(scenario.n_classes),
    )
    out_rows = []
    k = 0
    for va in grid_a:
        for vb in grid_b:
            out_rows.append((va, vb, *rows[k]))
            k += 1
    return SweepTable(
        columns=columns,
        axis_columns=(axis_a.column_name, axis_b.column_name),
        axis_counts=(len(grid_a), len(grid_b)),
        rows=tuple(out_rows),
        policy=policy,
    )


def _format_value(v: float) -> str:
    return format(float(v), ".9g")


def emit_csv(table: SweepTable, destination) -> int:
    """Write the table as CSV (9 significant digits, LF, UTF-8).

    Returns the byte count written.  Output is a pure function of the
    table, so re-emission is byte-identical.
    """
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(_format_value(v) for v in row))
    payload = ("\n".join(lines) + "\n").encode("utf-8")
    with open(destination, "wb") as fh:
        fh.write(payload)
    return len(payload)


def summarize(results) -> dict:
    """Aggregate statistics over one or more simulation results.

    Per policy: throughput mean/min/max, mean objective, mean per-class
    QoS, violation totals, and a plateau statistic (coefficient of
    variation of throughput over the final 25% of epochs).
    """
    results = list(results)
    if not results:
        raise ValidationError("summarize: no results")
    out = []
    for res in results:
        epochs = res.epochs
        tail = max(1, epochs // 4)
        tail_vals = [float(x) for x in res.throughput[epochs - tail :]]
        mean_tail = sum(tail_vals) / len(tail_vals)
        var_tail = sum((x - mean_tail) ** 2 for x in tail_vals) / len(tail_vals)
        cv = math.sqrt(var_tail) / mean_tail if mean_tail != 0.0 else 0.0
        mean_qos = [
            sum(float(x) for x in res.qos[:, i]) / epochs
            for i in range(res.n_classes)
        ]
        out.append(
            {
                "policy": res.policy.value,
                "mean_throughput": res.mean_throughput,
                "min_throughput": res.min_throughput,
                "max_throughput": res.max_throughput,
                "mean_objective": res.mean_objective,
                "mean_effective_throughput": res.mean_effective_throughput,
                "mean_qos": mean_qos,
                "violation_counts": list(res.violation_counts),
                "total_violations": sum(res.violation_counts),
                "infeasible_epochs": res.infeasible_epochs,
                "plateau_cv": cv,
            }
        )
    return {"policies": out}
