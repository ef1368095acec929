"""Allocation policies over a shared resource pool.

Four policies:

* ``static`` — equal split of the pool, ignoring all state.
* ``loadbalanceonly`` — pool scaled by load-headroom and demand shares.
* ``dynamic`` — the factor-product rule: pool times the product of six
  normalized per-class factors (priority, bandwidth availability,
  latency sensitivity, demand, QoS, load headroom) plus an equal-share
  baseline, then projected back into the feasible region.
* ``optimalreference`` — exact greedy maximizer of the priority-weighted
  objective, used as an oracle when judging the heuristic policies.

Raw dynamic outputs routinely exceed the pool (the baseline alone sums
to it), so :func:`project_feasible` rescales proportionally; both raw
and projected vectors are kept in every report.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DegenerateShareError, InfeasibleAllocationError, ValidationError
from .model import (
    AllocationReport,
    ResourcePool,
    TrafficClass,
    TrafficObservation,
    Violation,
    check_constraints,
    effective_throughput,
    objective,
    qos_score,
    throughput,
)

# Below this, a share denominator counts as all-zero and is an error,
# never a silent fallback.
SHARE_EPSILON = 1e-12


class PolicyKind(enum.Enum):
    """Allocation policies; serialized by exact lowercase name."""

    STATIC = "static"
    LOAD_BALANCE_ONLY = "loadbalanceonly"
    DYNAMIC = "dynamic"
    OPTIMAL_REFERENCE = "optimalreference"


@dataclass(frozen=True)
class AllocationBreakdown:
    """The dynamic rule's per-class factors, for inspection and charts.

    ``raw = pool.total * (product of the six factors) + baseline`` and
    each ``*_share`` vector sums to 1 across classes.
    ``offered_bandwidth_missing`` marks the zero-bandwidth special case
    where the availability factor defaults to 1.
    """

    class_id: int
    priority_share: float
    bandwidth_factor: float
    latency_share: float
    demand_share: float
    qos_share: float
    load_share: float
    baseline: float
    raw: float
    offered_bandwidth_missing: bool = False


def allocate_static(pool: ResourcePool) -> list[float]:
    """Equal split: every class gets total/n_classes."""
    share = pool.total / pool.n_classes
    return [share] * pool.n_classes


def allocate_loadbalance(
    observations: list[TrafficObservation], pool: ResourcePool
) -> list[float]:
    """Load-headroom times demand share, scaled by the pool.

    A_i = R * ((1 - Ld_i) / sum_j (1 - Ld_j)) * (D_i / sum_j D_j)

    The proportional rule is scaled by the pool so it is a concrete
    allocation comparable with the other policies.
    """
    if not observations:
        raise ValidationError("allocate_loadbalance: no observations")
    sum_headroom = 0.0
    sum_demand = 0.0
    for obs in observations:
        sum_headroom += 1.0 - obs.load
        sum_demand += obs.demand
    if sum_headroom <= SHARE_EPSILON:
        raise DegenerateShareError("load headroom")
    if sum_demand <= SHARE_EPSILON:
        raise DegenerateShareError("demand")
    r = pool.total
    return [
        r * ((1.0 - obs.load) / sum_headroom) * (obs.demand / sum_demand)
        for obs in observations
    ]


def dynamic_breakdown(
    classes: list[TrafficClass],
    observations: list[TrafficObservation],
    qos: list[float],
    pool: ResourcePool,
) -> list[AllocationBreakdown]:
    """Factor decomposition of the dynamic rule for every class.

    Shares normalize priority, latency sensitivity, demand, QoS and load
    headroom each to sum 1; the bandwidth factor is min(B_i, R)/B_i
    (1 when B_i is 0, flagged).  raw_i = R * product + R/N.
    """
    n = len(classes)
    if not n or len(observations) != n or len(qos) != n:
        raise ValidationError("dynamic_breakdown: classes/observations/qos length mismatch")
    sum_priority = 0.0
    sum_sensitivity = 0.0
    sum_demand = 0.0
    sum_qos = 0.0
    sum_headroom = 0.0
    for cls, obs, q in zip(classes, observations, qos):
        sum_priority += cls.priority
        sum_sensitivity += cls.latency_sensitivity
        sum_demand += obs.demand
        sum_qos += q
        sum_headroom += 1.0 - obs.load
    if sum_priority <= SHARE_EPSILON:
        raise DegenerateShareError("priority")
    if sum_sensitivity <= SHARE_EPSILON:
        raise DegenerateShareError("latency sensitivity")
    if sum_demand <= SHARE_EPSILON:
        raise DegenerateShareError("demand")
    if sum_qos <= SHARE_EPSILON:
        raise DegenerateShareError("qos")
    if sum_headroom <= SHARE_EPSILON:
        raise DegenerateShareError("load headroom")

    r = pool.total
    baseline = r / pool.n_classes
    out = []
    for cls, obs, q in zip(classes, observations, qos):
        b = obs.offered_bandwidth
        missing = b == 0.0
        bandwidth_factor = 1.0 if missing else (b if b < r else r) / b
        priority_share = cls.priority / sum_priority
        latency_share = cls.latency_sensitivity / sum_sensitivity
        demand_share = obs.demand / sum_demand
        qos_share = q / sum_qos
        load_share = (1.0 - obs.load) / sum_headroom
        raw = (
            r
            * (
                priority_share
                * bandwidth_factor
                * latency_share
                * demand_share
                * qos_share
                * load_share
            )
            + baseline
        )
        out.append(
            AllocationBreakdown(
                class_id=cls.id,
                priority_share=priority_share,
                bandwidth_factor=bandwidth_factor,
                latency_share=latency_share,
                demand_share=demand_share,
                qos_share=qos_share,
                load_share=load_share,
                baseline=baseline,
                raw=raw,
                offered_bandwidth_missing=missing,
            )
        )
    return out


def project_feasible(
    raw: list[float] | tuple[float, ...],
    classes: list[TrafficClass],
    pool: ResourcePool,
) -> tuple[list[float], list[frozenset[Violation]]]:
    """Rescale a raw vector into the pool, preserving relative shares.

    Identity when the raw total already fits; otherwise a uniform
    proportional rescale by R/sum(raw).  Classes left below their
    demanded bandwidth are flagged, never redistributed.
    """
    for a in raw:
        if a < 0:
            raise ValidationError("project_feasible: raw allocations must be >= 0")
    total = 0.0
    for a in raw:
        total += a
    if total > pool.total:
        scale = pool.total / total
        alloc = [a * scale for a in raw]
    else:
        alloc = list(raw)
    flags = [
        frozenset((Violation.BELOW_DEMANDED_BANDWIDTH,))
        if a < cls.demanded_bandwidth
        else frozenset()
        for a, cls in zip(alloc, classes)
    ]
    return alloc, flags


def optimal_reference(
    classes: list[TrafficClass],
    observations: list[TrafficObservation],
    pool: ResourcePool,
) -> list[float]:
    """Exact maximizer of sum(P_i * A_i / D_i) on the feasible box.

    Bounds: demanded_bandwidth_i <= A_i <= D_i and sum(A_i) <= R.  The
    objective is linear, so a greedy fill in strictly decreasing order
    of P_i/D_i (ties by ascending class id) is exact.  Capping at the
    demand keeps the oracle from dumping all slack on one class.
    """
    n = len(classes)
    if not n or len(observations) != n:
        raise ValidationError("optimal_reference: classes/observations length mismatch")
    sum_lower = 0.0
    for cls, obs in zip(classes, observations):
        if cls.demanded_bandwidth > obs.demand:
            raise InfeasibleAllocationError(
                f"class {cls.id}: demanded bandwidth {cls.demanded_bandwidth} "
                f"exceeds demand cap {obs.demand}"
            )
        sum_lower += cls.demanded_bandwidth
    if sum_lower > pool.total:
        raise InfeasibleAllocationError(
            f"demanded bandwidth total {sum_lower} exceeds pool {pool.total}"
        )
    alloc = [cls.demanded_bandwidth for cls in classes]
    budget = pool.total - sum_lower
    rates = [cls.priority / obs.demand for cls, obs in zip(classes, observations)]
    for i in sorted(range(n), key=lambda i: (-rates[i], i)):
        if budget <= 0.0:
            break
        room = observations[i].demand - alloc[i]
        take = room if room < budget else budget
        if take > 0.0:
            alloc[i] += take
            budget -= take
    return alloc


def allocate_dynamic(
    classes: list[TrafficClass],
    observations: list[TrafficObservation],
    pool: ResourcePool,
) -> AllocationReport:
    """Full dynamic allocation: QoS -> factor product -> projection -> report."""
    return evaluate(PolicyKind.DYNAMIC, classes, observations, pool)


def evaluate(
    policy: PolicyKind,
    classes: list[TrafficClass],
    observations: list[TrafficObservation],
    pool: ResourcePool,
) -> AllocationReport:
    """Run one policy for one epoch and assemble the full report.

    An infeasible optimal-reference instance degrades to the lower
    bounds (then projection) instead of raising, so sweeps survive
    extreme parameter corners; the resulting shortfalls show up as
    violations.
    """
    if len(classes) != pool.n_classes or len(observations) != len(classes):
        raise ValidationError("evaluate: classes/observations/pool size mismatch")
    qos = [qos_score(obs, cls) for obs, cls in zip(observations, classes)]
    if policy is PolicyKind.STATIC:
        raw = allocate_static(pool)
    elif policy is PolicyKind.LOAD_BALANCE_ONLY:
        raw = allocate_loadbalance(observations, pool)
    elif policy is PolicyKind.DYNAMIC:
        raw = [b.raw for b in dynamic_breakdown(classes, observations, qos, pool)]
    elif policy is PolicyKind.OPTIMAL_REFERENCE:
        try:
            raw = optimal_reference(classes, observations, pool)
        except InfeasibleAllocationError:
            raw = [cls.demanded_bandwidth for cls in classes]
    else:  # pragma: no cover - exhaustive enum
        raise ValidationError(f"unknown policy {policy!r}")

    alloc, _ = project_feasible(raw, classes, pool)
    return AllocationReport(
        epoch=pool.epoch,
        raw_alloc=tuple(raw),
        alloc=tuple(alloc),
        qos=tuple(qos),
        throughput_raw=throughput(raw),
        throughput=throughput(alloc),
        effective_throughput=effective_throughput(alloc, qos, observations),
        objective=objective(alloc, observations, classes),
        violations=tuple(
            check_constraints(a, obs, cls, pool)
            for a, obs, cls in zip(alloc, observations, classes)
        ),
    )
