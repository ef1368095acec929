"""Scenario definition and the on-disk scenario file format.

Scenario files are YAML with a fixed, versioned schema (documented in
README.md).  Parsing is strict: unknown keys are rejected at every
level and every type invariant is checked with the offending field
named, so a scenario that loads is guaranteed runnable.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .errors import ScenarioError, ValidationError
from .model import TrafficClass, TrafficKind

FORMAT_VERSION = 1

# Attribute order shared with the trace kernels: substream index of
# (class c, attribute a) is c * len(ATTRIBUTES) + ATTRIBUTES.index(a).
ATTRIBUTES = ("bandwidth", "latency", "jitter", "packet_loss", "demand")


class TraceModel(enum.Enum):
    """How per-epoch observations are generated; lowercase wire names."""

    CONSTANT = "constant"
    UNIFORM_SAMPLE = "uniformsample"
    BOUNDED_WALK = "boundedwalk"


@dataclass(frozen=True)
class RangeSpec:
    """Inclusive [min, max] interval with a grid resolution.

    Used two ways: as an evenly spaced inclusive grid of ``count``
    values when swept, and as plain sampling bounds when the trace
    model draws stochastically.
    """

    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.min > self.max:
            raise ValidationError(f"range min {self.min} exceeds max {self.max}")
        if self.count < 1:
            raise ValidationError("range count must be >= 1")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.min + self.max)

    def grid(self) -> list[float]:
        """``count`` evenly spaced values from min to max inclusive."""
        if self.count == 1:
            return [self.min]
        step = (self.max - self.min) / (self.count - 1)
        return [self.min + k * step for k in range(self.count)]


_RANGE_BOUNDS = {
    # attribute: (hard lower bound, allow_zero_lower, hard upper bound)
    "bandwidth": (0.0, True, None),
    "latency": (0.0, False, None),
    "jitter": (0.0, False, None),
    "packet_loss": (0.0, True, 1.0),
    "demand": (0.0, False, None),
}


@dataclass(frozen=True)
class Scenario:
    """Everything a run needs: classes, pool, trace process, seed."""

    classes: tuple[TrafficClass, ...]
    pool_total: float
    epochs: int
    seed: int
    trace_model: TraceModel
    ranges: dict[str, RangeSpec]
    initial_load: tuple[float, ...]
    walk_step_fraction: float = 0.05
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.classes:
            raise ValidationError("scenario needs at least one class")
        ids = [cls.id for cls in self.classes]
        if ids != list(range(len(ids))):
            raise ValidationError(
                f"class ids must be unique and contiguous from 0, got {ids}"
            )
        if self.pool_total < 0:
            raise ValidationError("pool_total must be >= 0")
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must fit an unsigned 64-bit integer")
        if not 0.0 < self.walk_step_fraction <= 1.0:
            raise ValidationError("walk_step_fraction must be in (0, 1]")
        if set(self.ranges) != set(ATTRIBUTES):
            missing = set(ATTRIBUTES) - set(self.ranges)
            extra = set(self.ranges) - set(ATTRIBUTES)
            raise ValidationError(
                f"ranges must cover exactly {ATTRIBUTES}; "
                f"missing {sorted(missing)}, unknown {sorted(extra)}"
            )
        for attr, spec in self.ranges.items():
            lower, allow_zero, upper = _RANGE_BOUNDS[attr]
            if spec.min < lower or (not allow_zero and spec.min <= lower):
                op = ">=" if allow_zero else ">"
                raise ValidationError(f"{attr} range min must be {op} {lower}")
            if upper is not None and spec.max > upper:
                raise ValidationError(f"{attr} range max must be <= {upper}")
        if len(self.initial_load) != len(self.classes):
            raise ValidationError("initial_load length must match class count")
        for i, load in enumerate(self.initial_load):
            if not 0.0 <= load < 1.0:
                raise ValidationError(f"initial_load[{i}] must be in [0, 1)")

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def to_dict(self) -> dict:
        """Plain-data form; also the canonical serialization that is hashed."""
        return {
            "format_version": FORMAT_VERSION,
            "pool_total": self.pool_total,
            "epochs": self.epochs,
            "seed": self.seed,
            "trace_model": self.trace_model.value,
            "walk_step_fraction": self.walk_step_fraction,
            "initial_load": list(self.initial_load),
            "ranges": {
                attr: {"min": spec.min, "max": spec.max, "count": spec.count}
                for attr, spec in sorted(self.ranges.items())
            },
            "classes": [
                {
                    "id": cls.id,
                    "name": cls.name,
                    "kind": cls.kind.value,
                    "priority": cls.priority,
                    "demanded_bandwidth": cls.demanded_bandwidth,
                    "latency_sensitivity": cls.latency_sensitivity,
                    "max_latency": cls.max_latency,
                    "max_jitter": cls.max_jitter,
                    "max_packet_loss": cls.max_packet_loss,
                }
                for cls in self.classes
            ],
            "metadata": dict(sorted(self.metadata.items())),
        }

    def fingerprint(self) -> str:
        """SHA-256 over the canonical JSON serialization; platform-stable."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _reject_unknown(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ScenarioError(f"{where}: unknown keys {sorted(unknown)}")


def _number(mapping: dict, key: str, where: str) -> float:
    value = mapping.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ScenarioError(f"{where}: {key!r} must be a number, got {value!r}")
    return float(value)


def _integer(mapping: dict, key: str, where: str) -> int:
    value = mapping.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ScenarioError(f"{where}: {key!r} must be an integer, got {value!r}")
    return value


_TOP_KEYS = {
    "format_version",
    "pool_total",
    "epochs",
    "seed",
    "trace_model",
    "walk_step_fraction",
    "initial_load",
    "ranges",
    "classes",
    "metadata",
}
_CLASS_KEYS = {
    "id",
    "name",
    "kind",
    "priority",
    "demanded_bandwidth",
    "latency_sensitivity",
    "max_latency",
    "max_jitter",
    "max_packet_loss",
}


def scenario_from_dict(data: dict, where: str = "scenario") -> Scenario:
    """Build and validate a Scenario from parsed plain data."""
    if not isinstance(data, dict):
        raise ScenarioError(f"{where}: expected a mapping at top level")
    _reject_unknown(data, _TOP_KEYS, where)
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise ScenarioError(
            f"{where}: format_version must be {FORMAT_VERSION}, got {version!r}"
        )
    for key in ("pool_total", "epochs", "seed", "trace_model", "ranges", "classes"):
        if key not in data:
            raise ScenarioError(f"{where}: missing required key {key!r}")

    model_name = data["trace_model"]
    try:
        trace_model = TraceModel(model_name)
    except ValueError:
        names = ", ".join(m.value for m in TraceModel)
        raise ScenarioError(
            f"{where}: trace_model must be one of {names}, got {model_name!r}"
        ) from None

    ranges_data = data["ranges"]
    if not isinstance(ranges_data, dict):
        raise ScenarioError(f"{where}: 'ranges' must be a mapping")
    ranges = {}
    for attr, spec in ranges_data.items():
        rwhere = f"{where}.ranges.{attr}"
        if not isinstance(spec, dict):
            raise ScenarioError(f"{rwhere}: expected a mapping with min/max/count")
        _reject_unknown(spec, {"min", "max", "count"}, rwhere)
        ranges[attr] = RangeSpec(
            min=_number(spec, "min", rwhere),
            max=_number(spec, "max", rwhere),
            count=_integer(spec, "count", rwhere),
        )

    classes_data = data["classes"]
    if not isinstance(classes_data, list) or not classes_data:
        raise ScenarioError(f"{where}: 'classes' must be a nonempty list")
    classes = []
    for pos, cdata in enumerate(classes_data):
        cwhere = f"{where}.classes[{pos}]"
        if not isinstance(cdata, dict):
            raise ScenarioError(f"{cwhere}: expected a mapping")
        _reject_unknown(cdata, _CLASS_KEYS, cwhere)
        kind_name = cdata.get("kind", "custom")
        try:
            kind = TrafficKind(kind_name)
        except ValueError:
            names = ", ".join(k.value for k in TrafficKind)
            raise ScenarioError(
                f"{cwhere}: kind must be one of {names}, got {kind_name!r}"
            ) from None
        name = cdata.get("name")
        if not isinstance(name, str) or not name:
            raise ScenarioError(f"{cwhere}: 'name' must be a nonempty string")
        classes.append(
            TrafficClass(
                id=_integer(cdata, "id", cwhere),
                name=name,
                kind=kind,
                priority=_number(cdata, "priority", cwhere),
                demanded_bandwidth=_number(cdata, "demanded_bandwidth", cwhere),
                latency_sensitivity=_number(cdata, "latency_sensitivity", cwhere),
                max_latency=_number(cdata, "max_latency", cwhere),
                max_jitter=_number(cdata, "max_jitter", cwhere),
                max_packet_loss=_number(cdata, "max_packet_loss", cwhere),
            )
        )
    classes.sort(key=lambda cls: cls.id)

    initial_load = data.get("initial_load", [0.0] * len(classes))
    if not isinstance(initial_load, list):
        raise ScenarioError(f"{where}: 'initial_load' must be a list of numbers")

    metadata = data.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ScenarioError(f"{where}: 'metadata' must be a mapping")

    return Scenario(
        classes=tuple(classes),
        pool_total=_number(data, "pool_total", where),
        epochs=_integer(data, "epochs", where),
        seed=_integer(data, "seed", where),
        trace_model=trace_model,
        ranges=ranges,
        initial_load=tuple(float(x) for x in initial_load),
        walk_step_fraction=_number(data, "walk_step_fraction", where)
        if "walk_step_fraction" in data
        else 0.05,
        metadata=metadata,
    )


def parse_scenario(path: str | Path) -> Scenario:
    """Load and fully validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read scenario file: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        at = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ScenarioError(f"{path}: parse error{at}: {exc}") from exc
    try:
        return scenario_from_dict(data, where=str(path))
    except ScenarioError:
        raise
    except ValidationError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def default_scenario_path() -> Path:
    """Filesystem path of the bundled default scenario."""
    return Path(str(resources.files("dtasim").joinpath("data/default.scenario")))


def load_default_scenario() -> Scenario:
    return parse_scenario(default_scenario_path())
