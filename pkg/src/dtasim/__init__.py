"""QoS-aware dynamic traffic allocation simulator.

Scores per-class quality of service, splits a shared resource pool
across heterogeneous traffic classes under static, load-balancing,
dynamic, and optimal-reference policies, and replays parameter sweeps
into CSV tables and SVG charts, deterministically.
"""

from ._backend import backend_name
from .allocator import (
    AllocationBreakdown,
    PolicyKind,
    allocate_dynamic,
    allocate_loadbalance,
    allocate_static,
    dynamic_breakdown,
    evaluate,
    optimal_reference,
    project_feasible,
)
from .charts import ChartKind, ChartSpec, emit_svg
from .errors import (
    DegenerateShareError,
    DtaSimError,
    InfeasibleAllocationError,
    ScenarioError,
    ValidationError,
)
from .model import (
    AllocationReport,
    ResourcePool,
    TrafficClass,
    TrafficKind,
    TrafficObservation,
    Violation,
    check_constraints,
    effective_throughput,
    objective,
    qos_score,
    throughput,
    traffic_fractions,
)
from .scenario import (
    ATTRIBUTES,
    RangeSpec,
    Scenario,
    TraceModel,
    default_scenario_path,
    load_default_scenario,
    parse_scenario,
    scenario_from_dict,
)
from .simulator import (
    PolicyComparison,
    PolicyDelta,
    SimulationResult,
    compare_policies,
    generate_trace,
    run,
    trace_arrays,
    update_load,
)
from .sweep import (
    AxisTarget,
    SweepAxis,
    SweepTable,
    default_axis_range,
    emit_csv,
    series_table,
    summarize,
    sweep1d,
    sweep2d,
)

__version__ = "0.1.0"

__all__ = [
    "ATTRIBUTES",
    "AllocationBreakdown",
    "AllocationReport",
    "AxisTarget",
    "ChartKind",
    "ChartSpec",
    "DegenerateShareError",
    "DtaSimError",
    "InfeasibleAllocationError",
    "PolicyComparison",
    "PolicyDelta",
    "PolicyKind",
    "RangeSpec",
    "ResourcePool",
    "Scenario",
    "ScenarioError",
    "SimulationResult",
    "SweepAxis",
    "SweepTable",
    "TraceModel",
    "TrafficClass",
    "TrafficKind",
    "TrafficObservation",
    "ValidationError",
    "Violation",
    "allocate_dynamic",
    "allocate_loadbalance",
    "allocate_static",
    "backend_name",
    "check_constraints",
    "compare_policies",
    "default_axis_range",
    "default_scenario_path",
    "dynamic_breakdown",
    "effective_throughput",
    "emit_csv",
    "emit_svg",
    "evaluate",
    "generate_trace",
    "load_default_scenario",
    "objective",
    "optimal_reference",
    "parse_scenario",
    "project_feasible",
    "qos_score",
    "run",
    "scenario_from_dict",
    "series_table",
    "summarize",
    "sweep1d",
    "sweep2d",
    "throughput",
    "trace_arrays",
    "traffic_fractions",
    "update_load",
    "__version__",
]
