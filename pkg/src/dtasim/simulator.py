"""Discrete-time simulation engine.

Generates per-epoch observation traces from a Scenario, steps an
allocation policy over them while evolving per-class load, and runs
paired policy comparisons on one shared trace.  The per-epoch number
crunching lives in the kernel backend (see _backend); this module owns
scenario plumbing, result packaging, and the load evolution law.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .allocator import PolicyKind
from .errors import ValidationError
from .model import AllocationReport, TrafficObservation, violations_from_mask
from .scenario import ATTRIBUTES, Scenario, TraceModel

_LOAD_CAP = 1.0 - 1e-6
_ALLOC_FLOOR = 1e-9

_MODEL_IDS = {
    TraceModel.CONSTANT: kernels.MODEL_CONSTANT,
    TraceModel.UNIFORM_SAMPLE: kernels.MODEL_UNIFORM,
    TraceModel.BOUNDED_WALK: kernels.MODEL_WALK,
}

_POLICY_IDS = {
    PolicyKind.STATIC: kernels.POLICY_STATIC,
    PolicyKind.LOAD_BALANCE_ONLY: kernels.POLICY_LOAD_BALANCE,
    PolicyKind.DYNAMIC: kernels.POLICY_DYNAMIC,
    PolicyKind.OPTIMAL_REFERENCE: kernels.POLICY_OPTIMAL,
}


def _seq_mean(values) -> float:
    # sequential sum, not np.mean: keeps aggregates bit-stable across
    # platforms and identical between backends
    total = 0.0
    count = 0
    for v in values:
        total += float(v)
        count += 1
    return total / count


@dataclass(eq=False)
class SimulationResult:
    """Full output of one policy run: per-epoch arrays plus aggregates.

    Array rows are epochs; columns are classes in id order.  ``load``
    holds the load vector each epoch's allocation actually used (epoch
    0 row is the scenario's initial load).
    """

    scenario_fingerprint: str
    policy: PolicyKind
    pool_total: float
    raw: np.ndarray = field(repr=False)
    alloc: np.ndarray = field(repr=False)
    qos: np.ndarray = field(repr=False)
    load: np.ndarray = field(repr=False)
    throughput_raw: np.ndarray = field(repr=False)
    throughput: np.ndarray = field(repr=False)
    effective_throughput: np.ndarray = field(repr=False)
    objective: np.ndarray = field(repr=False)
    violation_masks: np.ndarray = field(repr=False)
    infeasible: np.ndarray = field(repr=False)

    @property
    def epochs(self) -> int:
        return self.alloc.shape[0]

    @property
    def n_classes(self) -> int:
        return self.alloc.shape[1]

    @property
    def mean_throughput(self) -> float:
        return _seq_mean(self.throughput)

    @property
    def min_throughput(self) -> float:
        return float(self.throughput.min())

    @property
    def max_throughput(self) -> float:
        return float(self.throughput.max())

    @property
    def mean_objective(self) -> float:
        return _seq_mean(self.objective)

    @property
    def mean_effective_throughput(self) -> float:
        return _seq_mean(self.effective_throughput)

    @property
    def violation_counts(self) -> tuple[int, ...]:
        """Per class, the number of epochs with at least one violation."""
        return tuple(int(x) for x in (self.violation_masks != 0).sum(axis=0))

    @property
    def infeasible_epochs(self) -> int:
        return int(self.infeasible.sum())

    @property
    def final_load(self) -> tuple[float, ...]:
        if self.epochs == 0:
            return ()
        return tuple(float(x) for x in self.load[-1])

    @functools.cached_property
    def reports(self) -> tuple[AllocationReport, ...]:
        """The run as a per-epoch AllocationReport series."""
        out = []
        for e in range(self.epochs):
            out.append(
                AllocationReport(
                    epoch=e,
                    raw_alloc=tuple(float(x) for x in self.raw[e]),
                    alloc=tuple(float(x) for x in self.alloc[e]),
                    qos=tuple(float(x) for x in self.qos[e]),
                    throughput_raw=float(self.throughput_raw[e]),
                    throughput=float(self.throughput[e]),
                    effective_throughput=float(self.effective_throughput[e]),
                    objective=float(self.objective[e]),
                    violations=tuple(
                        violations_from_mask(int(m)) for m in self.violation_masks[e]
                    ),
                )
            )
        return tuple(out)

    def summary(self) -> dict:
        """Aggregate stats as plain data (CLI and report output)."""
        return {
            "policy": self.policy.value,
            "fingerprint": self.scenario_fingerprint,
            "epochs": self.epochs,
            "n_classes": self.n_classes,
            "mean_throughput": self.mean_throughput,
            "min_throughput": self.min_throughput,
            "max_throughput": self.max_throughput,
            "mean_objective": self.mean_objective,
            "mean_effective_throughput": self.mean_effective_throughput,
            "violation_counts": list(self.violation_counts),
            "infeasible_epochs": self.infeasible_epochs,
        }


@dataclass(frozen=True)
class PolicyDelta:
    """Aggregate differences of one policy against the baseline policy."""

    policy: PolicyKind
    mean_throughput: float
    mean_objective: float
    mean_effective_throughput: float


@dataclass(eq=False)
class PolicyComparison:
    """Results of several policies stepped over one identical trace."""

    scenario_fingerprint: str
    policies: tuple[PolicyKind, ...]
    results: tuple[SimulationResult, ...]
    deltas: tuple[PolicyDelta, ...]

    @property
    def baseline(self) -> SimulationResult:
        return self.results[0]


def trace_arrays(scenario: Scenario) -> np.ndarray:
    """The raw (epochs, n_classes, 5) trace for a scenario.

    Attribute columns follow scenario.ATTRIBUTES order.  Deterministic
    in (seed, scenario); bit-identical on every platform and backend.
    """
    mins = [scenario.ranges[a].min for a in ATTRIBUTES]
    maxs = [scenario.ranges[a].max for a in ATTRIBUTES]
    return kernels.generate_trace(
        scenario.seed,
        scenario.epochs,
        scenario.n_classes,
        _MODEL_IDS[scenario.trace_model],
        mins,
        maxs,
        scenario.walk_step_fraction,
    )


def generate_trace(scenario: Scenario) -> list[list[TrafficObservation]]:
    """Per-epoch observation vectors for a scenario.

    The load field carries the scenario's initial load as a
    placeholder; run() substitutes the evolved load each epoch.
    """
    arr = trace_arrays(scenario)
    epochs, n, _ = arr.shape
    rows = arr.tolist()
    out = []
    for e in range(epochs):
        row = rows[e]
        out.append(
            [
                TrafficObservation(
                    class_id=i,
                    offered_bandwidth=row[i][0],
                    latency=row[i][1],
                    jitter=row[i][2],
                    packet_loss=row[i][3],
                    demand=row[i][4],
                    load=scenario.initial_load[i],
                )
                for i in range(n)
            ]
        )
    return out


def update_load(report: AllocationReport, observations) -> list[float]:
    """Next-epoch load vector from this epoch's allocation.

    u = demand / max(alloc, 1e-9) mapped through u / (1 + u), capped at
    1 - 1e-6: fully served demand lands on 0.5, over-provisioning
    pushes below it, starvation saturates just under 1.  Under-served
    classes therefore gain share wherever load headroom (1 - load)
    enters an allocation rule.
    """
    if len(report.alloc) != len(observations):
        raise ValidationError("update_load: report/observations length mismatch")
    out = []
    for a, obs in zip(report.alloc, observations):
        floored = a if a > _ALLOC_FLOOR else _ALLOC_FLOOR
        u = obs.demand / floored
        mapped = u / (1.0 + u)
        out.append(mapped if mapped < _LOAD_CAP else _LOAD_CAP)
    return out


def run(
    scenario: Scenario,
    policy: PolicyKind,
    trace: np.ndarray | None = None,
) -> SimulationResult:
    """Step one policy over the scenario's full trace.

    Each epoch: observations -> policy allocation -> feasibility
    projection -> report row -> load update feeding the next epoch.
    Deterministic given (scenario, policy).  ``trace`` lets callers
    share one precomputed trace across runs; it must come from
    trace_arrays(scenario).
    """
    if trace is None:
        trace = trace_arrays(scenario)
    n = scenario.n_classes
    if trace.shape != (scenario.epochs, n, 5):
        raise ValidationError(
            f"trace shape {trace.shape} does not match scenario "
            f"({scenario.epochs}, {n}, 5)"
        )
    classes = scenario.classes
    series = kernels.run_series(
        trace,
        np.array([c.priority for c in classes], dtype=np.float64),
        np.array([c.demanded_bandwidth for c in classes], dtype=np.float64),
        np.array([c.latency_sensitivity for c in classes], dtype=np.float64),
        np.array([c.max_latency for c in classes], dtype=np.float64),
        np.array([c.max_jitter for c in classes], dtype=np.float64),
        np.array([c.max_packet_loss for c in classes], dtype=np.float64),
        scenario.pool_total,
        _POLICY_IDS[policy],
        np.array(scenario.initial_load, dtype=np.float64),
    )
    return SimulationResult(
        scenario_fingerprint=scenario.fingerprint(),
        policy=policy,
        pool_total=scenario.pool_total,
        raw=series["raw"],
        alloc=series["alloc"],
        qos=series["qos"],
        load=series["load"],
        throughput_raw=series["throughput_raw"],
        throughput=series["throughput"],
        effective_throughput=series["effective"],
        objective=series["objective"],
        violation_masks=series["violations"],
        infeasible=series["infeasible"],
    )


def compare_policies(
    scenario: Scenario,
    policies,
) -> PolicyComparison:
    """Run several policies over one identical trace and report deltas.

    The trace is generated once and shared, so every policy sees the
    same observation stream element for element.  Deltas are each
    policy's aggregates minus the first (baseline) policy's.
    """
    policies = tuple(policies)
    if len(policies) < 2:
        raise ValidationError("compare_policies needs at least 2 policies")
    trace = trace_arrays(scenario)
    results = tuple(run(scenario, p, trace=trace) for p in policies)
    base = results[0]
    deltas = tuple(
        PolicyDelta(
            policy=res.policy,
            mean_throughput=res.mean_throughput - base.mean_throughput,
            mean_objective=res.mean_objective - base.mean_objective,
            mean_effective_throughput=(
                res.mean_effective_throughput - base.mean_effective_throughput
            ),
        )
        for res in results
    )
    return PolicyComparison(
        scenario_fingerprint=scenario.fingerprint(),
        policies=policies,
        results=results,
        deltas=deltas,
    )
