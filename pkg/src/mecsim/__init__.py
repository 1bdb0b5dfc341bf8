"""Deadline-aware queueing and sequential-forwarding simulation for MEC clusters."""

from .charts import render_chart
from .metrics import AggregateStats, aggregate, write_csv
from .oracle import (
    Violation,
    ViolationKind,
    exhaustive_feasible,
    oracle_feasible,
    validate_schedule,
)
from .queues import (
    AdmitKind,
    AdmitOutcome,
    FifoQueue,
    PreferentialQueue,
    Request,
    RequestBlock,
    useful_area,
)
from .simulation import (
    NodeState,
    ReplicationResult,
    SimParams,
    derive_seed,
    dispatch,
    pick_neighbor,
    run_many,
    run_replication,
)
from .workload import (
    ScenarioConfig,
    ScenarioError,
    ServiceSpec,
    builtin_scenario,
    generate_requests,
    parse_scenario_file,
    write_scenario_file,
)

__version__ = "0.1.0"

__all__ = [
    "AdmitKind",
    "AdmitOutcome",
    "AggregateStats",
    "FifoQueue",
    "NodeState",
    "PreferentialQueue",
    "ReplicationResult",
    "Request",
    "RequestBlock",
    "ScenarioConfig",
    "ScenarioError",
    "ServiceSpec",
    "SimParams",
    "Violation",
    "ViolationKind",
    "aggregate",
    "builtin_scenario",
    "derive_seed",
    "dispatch",
    "exhaustive_feasible",
    "generate_requests",
    "oracle_feasible",
    "parse_scenario_file",
    "pick_neighbor",
    "render_chart",
    "run_many",
    "run_replication",
    "useful_area",
    "validate_schedule",
    "write_csv",
    "write_scenario_file",
]
