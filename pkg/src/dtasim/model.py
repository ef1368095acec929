"""Traffic classes, per-epoch observations, QoS scoring and throughput metrics.

All operations here are pure functions of their inputs and safe to call
concurrently.  QoS is a multiplicative satisfaction score relative to a
class's bounds: 1.0 means every bound is met exactly, values above 1
mean headroom, and the score is deliberately left unclamped (clamping
happens only inside :func:`effective_throughput`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import ValidationError


class TrafficKind(enum.Enum):
    """Broad application categories; ``custom`` for anything else."""

    VOIP = "voip"
    VIDEO_STREAMING = "videostreaming"
    WEB_BROWSING = "webbrowsing"
    FILE_DOWNLOAD = "filedownload"
    CUSTOM = "custom"


class Violation(enum.Enum):
    """Per-class constraint diagnostics; values double as wire names."""

    NEGATIVE_ALLOCATION = "negative_allocation"
    EXCEEDS_POOL = "exceeds_pool"
    BELOW_DEMANDED_BANDWIDTH = "below_demanded_bandwidth"
    LATENCY_EXCEEDED = "latency_exceeded"
    JITTER_EXCEEDED = "jitter_exceeded"
    PACKET_LOSS_EXCEEDED = "packet_loss_exceeded"


# Bit positions used by the kernels' violation masks.
VIOLATION_BITS: tuple[tuple[int, Violation], ...] = (
    (1, Violation.NEGATIVE_ALLOCATION),
    (2, Violation.EXCEEDS_POOL),
    (4, Violation.BELOW_DEMANDED_BANDWIDTH),
    (8, Violation.LATENCY_EXCEEDED),
    (16, Violation.JITTER_EXCEEDED),
    (32, Violation.PACKET_LOSS_EXCEEDED),
)

_NO_VIOLATIONS: frozenset[Violation] = frozenset()


def violations_from_mask(mask: int) -> frozenset[Violation]:
    if mask == 0:
        return _NO_VIOLATIONS
    return frozenset(v for bit, v in VIOLATION_BITS if mask & bit)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


@dataclass(frozen=True)
class TrafficClass:
    """Static descriptor of one traffic type.

    ``priority`` weights the class in the allocation objective,
    ``latency_sensitivity`` is the dimensionless weight used by the
    dynamic policy's sensitivity share, and the ``max_*`` fields are the
    QoS bounds the class must stay within.
    """

    id: int
    name: str
    kind: TrafficKind
    priority: float
    demanded_bandwidth: float
    latency_sensitivity: float
    max_latency: float
    max_jitter: float
    max_packet_loss: float

    def __post_init__(self):
        _require(self.id >= 0, f"class {self.name!r}: id must be >= 0")
        _require(self.priority > 0, f"class {self.name!r}: priority must be > 0")
        _require(
            self.demanded_bandwidth > 0,
            f"class {self.name!r}: demanded_bandwidth must be > 0",
        )
        _require(
            self.latency_sensitivity > 0,
            f"class {self.name!r}: latency_sensitivity must be > 0",
        )
        _require(self.max_latency > 0, f"class {self.name!r}: max_latency must be > 0")
        _require(self.max_jitter > 0, f"class {self.name!r}: max_jitter must be > 0")
        _require(
            0.0 <= self.max_packet_loss <= 1.0,
            f"class {self.name!r}: max_packet_loss must be in [0, 1]",
        )


@dataclass
class TrafficObservation:
    """Measured state of one class at one epoch.

    Mutable on purpose: the simulator rewrites ``load`` as it evolves,
    and corrupt measurements are what :func:`qos_score` guards against.
    """

    class_id: int
    offered_bandwidth: float
    latency: float
    jitter: float
    packet_loss: float
    demand: float
    load: float

    def __post_init__(self):
        _require(self.offered_bandwidth >= 0, "offered_bandwidth must be >= 0")
        _require(self.latency > 0, "latency must be > 0")
        _require(self.jitter > 0, "jitter must be > 0")
        _require(0.0 <= self.packet_loss <= 1.0, "packet_loss must be in [0, 1]")
        _require(self.demand > 0, "demand must be > 0")
        _require(0.0 <= self.load < 1.0, "load must be in [0, 1)")


@dataclass(frozen=True)
class ResourcePool:
    """Total allocatable capacity and class count for one epoch."""

    total: float
    n_classes: int
    epoch: int = 0

    def __post_init__(self):
        _require(self.total >= 0, "pool total must be >= 0")
        _require(self.n_classes >= 1, "pool must cover at least one class")
        _require(self.epoch >= 0, "epoch must be >= 0")


@dataclass(frozen=True)
class AllocationReport:
    """Everything one allocation decision produced, pre- and post-projection.

    ``effective_throughput`` is this artifact's own QoS-derated metric,
    not part of the allocation rule itself.
    """

    epoch: int
    raw_alloc: tuple[float, ...]
    alloc: tuple[float, ...]
    qos: tuple[float, ...]
    throughput_raw: float
    throughput: float
    effective_throughput: float
    objective: float
    violations: tuple[frozenset[Violation], ...] = field(repr=False)


def qos_score(obs: TrafficObservation, cls: TrafficClass) -> float:
    """Multiplicative QoS satisfaction score for one class.

    (offered/demanded) * (max_latency/latency) * (max_jitter/jitter) * (1-loss)

    Exactly 1.0 when every bound is met exactly with zero loss; exactly
    0.0 when offered bandwidth is zero or loss is total.  Raises
    :class:`ValidationError` on a corrupt observation (non-positive
    latency or jitter, loss outside [0, 1], negative bandwidth) or a
    class with non-positive demanded bandwidth.
    """
    if obs.latency <= 0:
        raise ValidationError("qos_score: latency must be > 0")
    if obs.jitter <= 0:
        raise ValidationError("qos_score: jitter must be > 0")
    if cls.demanded_bandwidth <= 0:
        raise ValidationError("qos_score: demanded_bandwidth must be > 0")
    if obs.offered_bandwidth < 0:
        raise ValidationError("qos_score: offered_bandwidth must be >= 0")
    if not 0.0 <= obs.packet_loss <= 1.0:
        raise ValidationError("qos_score: packet_loss must be in [0, 1]")
    return (
        (obs.offered_bandwidth / cls.demanded_bandwidth)
        * (cls.max_latency / obs.latency)
        * (cls.max_jitter / obs.jitter)
        * (1.0 - obs.packet_loss)
    )


def check_constraints(
    alloc: float,
    obs: TrafficObservation,
    cls: TrafficClass,
    pool: ResourcePool,
) -> frozenset[Violation]:
    """Diagnostic flags for one class; empty set means fully compliant.

    Never raises: each bound is checked independently so a report can
    show every violated constraint at once.
    """
    flags = set()
    if alloc < 0:
        flags.add(Violation.NEGATIVE_ALLOCATION)
    if alloc > pool.total:
        flags.add(Violation.EXCEEDS_POOL)
    if alloc < cls.demanded_bandwidth:
        flags.add(Violation.BELOW_DEMANDED_BANDWIDTH)
    if obs.latency > cls.max_latency:
        flags.add(Violation.LATENCY_EXCEEDED)
    if obs.jitter > cls.max_jitter:
        flags.add(Violation.JITTER_EXCEEDED)
    if obs.packet_loss > cls.max_packet_loss:
        flags.add(Violation.PACKET_LOSS_EXCEEDED)
    return frozenset(flags) if flags else _NO_VIOLATIONS


def objective(
    allocs: list[float] | tuple[float, ...],
    observations: list[TrafficObservation],
    classes: list[TrafficClass],
) -> float:
    """Priority-weighted demand-satisfaction sum: sum(P_i * A_i / D_i)."""
    if not len(allocs) == len(observations) == len(classes):
        raise ValidationError("objective: allocs/observations/classes length mismatch")
    total = 0.0
    for a, obs, cls in zip(allocs, observations, classes):
        total += cls.priority * a / obs.demand
    return total


def throughput(allocs: list[float] | tuple[float, ...]) -> float:
    """Total allocated resource; allocations must be nonnegative."""
    total = 0.0
    for a in allocs:
        if a < 0:
            raise ValidationError("throughput: allocations must be >= 0")
        total += a
    return total


def traffic_fractions(allocs: list[float] | tuple[float, ...]) -> tuple[float, ...]:
    """Per-class fraction of the total allocation; entries sum to 1."""
    total = 0.0
    for a in allocs:
        total += a
    if total <= 0:
        raise ValidationError("traffic_fractions: total allocation is zero")
    return tuple(a / total for a in allocs)


def effective_throughput(
    allocs: list[float] | tuple[float, ...],
    qos: list[float] | tuple[float, ...],
    observations: list[TrafficObservation],
) -> float:
    """QoS-derated throughput: sum(A_i * min(1, QoS_i)).

    Artifact-defined metric: equals plain throughput when every class
    meets its bounds, and derates multiplicatively as latency, jitter or
    loss degrade beyond them.
    """
    if not len(allocs) == len(qos) == len(observations):
        raise ValidationError(
            "effective_throughput: allocs/qos/observations length mismatch"
        )
    total = 0.0
    for a, q in zip(allocs, qos):
        if q < 0:
            raise ValidationError("effective_throughput: qos must be >= 0")
        total += a * (q if q < 1.0 else 1.0)
    return total
