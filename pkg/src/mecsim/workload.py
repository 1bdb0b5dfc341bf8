"""Service catalog, built-in scenarios, and request-stream generation.

Scenarios can also be loaded from and saved to a small JSON format
(``schema_version`` 1), documented in the README.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .queues import Request

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """A scenario definition is malformed or inconsistent."""


@dataclass(frozen=True)
class ServiceSpec:
    """One service offered by every node.

    ``pixel_count`` and ``environment`` are inert metadata carried along
    for reporting; only ``process_time`` and ``deadline`` (both relative
    UT) affect simulation.
    """

    id: str
    process_time: float
    deadline: float
    pixel_count: int | None = None
    environment: str | None = None


@dataclass
class ScenarioConfig:
    """A named workload: services, node ids, and a node x service count matrix."""

    name: str
    services: list[ServiceSpec]
    nodes: list[str]
    counts: dict[str, dict[str, int]]

    def validate(self) -> None:
        if not self.name:
            raise ScenarioError("scenario name must be nonempty")
        if not self.services:
            raise ScenarioError("scenario declares no services")
        if not self.nodes:
            raise ScenarioError("scenario declares no nodes")
        service_ids = [s.id for s in self.services]
        if len(set(service_ids)) != len(service_ids):
            raise ScenarioError("duplicate service ids")
        if len(set(self.nodes)) != len(self.nodes):
            raise ScenarioError("duplicate node ids")
        for svc in self.services:
            if svc.process_time <= 0:
                raise ScenarioError(f"service {svc.id}: process_time must be > 0")
            if svc.deadline <= 0:
                raise ScenarioError(f"service {svc.id}: deadline must be > 0")
        known = set(service_ids)
        for node, row in self.counts.items():
            if node not in self.nodes:
                raise ScenarioError(f"counts reference undeclared node {node!r}")
            for sid, count in row.items():
                if sid not in known:
                    raise ScenarioError(
                        f"counts[{node!r}] reference undeclared service {sid!r}"
                    )
                if not isinstance(count, int) or isinstance(count, bool):
                    raise ScenarioError(f"counts[{node!r}][{sid!r}] must be an integer")
                if count < 0:
                    raise ScenarioError(f"counts[{node!r}][{sid!r}] is negative")

    def total_requests(self) -> int:
        return sum(sum(row.values()) for row in self.counts.values())

    def node_total(self, node: str) -> int:
        return sum(self.counts.get(node, {}).values())


_SERVICE_TABLE = [
    ("S1", 8294400, "busy", 180, 9000),
    ("S2", 2073600, "busy", 44, 9000),
    ("S3", 921600, "busy", 20, 9000),
    ("S4", 8294400, "isolated", 180, 4000),
    ("S5", 2073600, "isolated", 44, 4000),
    ("S6", 921600, "isolated", 20, 4000),
]

# Per-node request counts for services S1..S6.
_SCENARIO_COUNTS = {
    1: {
        "M1": [500, 300, 200, 500, 300, 200],
        "M2": [200, 300, 500, 200, 300, 500],
        "M3": [300, 500, 200, 300, 500, 200],
    },
    2: {
        "M1": [250, 300, 700, 250, 300, 700],
        "M2": [100, 300, 1000, 100, 300, 1000],
        "M3": [150, 500, 700, 150, 500, 700],
    },
    3: {
        "M1": [250, 300, 700, 250, 300, 700],
        "M2": [100, 300, 1000, 100, 300, 1000],
        "M3": [150, 500, 700, 150, 500, 700],
        "M4": [100, 100, 100, 100, 100, 100],
        "M5": [100, 100, 100, 100, 100, 100],
        "M6": [100, 100, 100, 100, 100, 100],
    },
}


def builtin_services() -> list[ServiceSpec]:
    return [
        ServiceSpec(id=sid, pixel_count=px, environment=env,
                    process_time=proc, deadline=dl)
        for sid, px, env, proc, dl in _SERVICE_TABLE
    ]


def builtin_scenario(n: int) -> ScenarioConfig:
    """Return built-in scenario 1, 2 or 3 (fresh objects on every call)."""
    if n not in _SCENARIO_COUNTS:
        raise ScenarioError(f"unknown builtin scenario: {n}")
    services = builtin_services()
    rows = _SCENARIO_COUNTS[n]
    counts = {
        node: {services[i].id: row[i] for i in range(len(services))}
        for node, row in rows.items()
    }
    config = ScenarioConfig(
        name=f"scenario-{n}",
        services=services,
        nodes=list(rows.keys()),
        counts=counts,
    )
    config.validate()
    return config


def generate_requests(scenario: ScenarioConfig, params, rng: random.Random) -> list[Request]:
    """Build the full arrival stream for one replication.

    Emits exactly ``counts[node][service]`` requests per cell.  Arrival
    times follow ``params.arrival_model`` (integer UT: batch arrivals
    are all 0, uniform arrivals are drawn on [0, horizon]); the stream
    is ordered by nondecreasing arrival time with a seeded shuffle
    breaking ties, and ids number the final order.  Deterministic for a
    given rng state.
    """
    scenario.validate()
    cells: list[tuple[str, ServiceSpec]] = []
    for node in scenario.nodes:
        row = scenario.counts.get(node, {})
        for svc in scenario.services:
            cells.extend((node, svc) for _ in range(row.get(svc.id, 0)))

    if params.arrival_model == "batch_at_zero":
        arrivals: list[int] = [0] * len(cells)
    elif params.arrival_model == "uniform_horizon":
        # Integer UT keeps every schedule computation exact.
        horizon = int(params.horizon)
        arrivals = [rng.randint(0, horizon) for _ in cells]
    else:
        raise ScenarioError(f"unknown arrival model: {params.arrival_model!r}")

    stream = list(zip(cells, arrivals))
    rng.shuffle(stream)
    stream.sort(key=lambda item: item[1])
    return [
        Request(
            id=i,
            service_id=svc.id,
            origin_node=node,
            arrival_time=arrival,
            process_time=svc.process_time,
            deadline_end=arrival + svc.deadline,
        )
        for i, ((node, svc), arrival) in enumerate(stream)
    ]


_TOP_KEYS = {"schema_version", "name", "services", "nodes", "counts"}
_SERVICE_KEYS = {"id", "process_time", "deadline", "pixel_count", "environment"}


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ScenarioError(message)


def parse_scenario_file(path: str | Path) -> ScenarioConfig:
    """Load and validate a scenario JSON file.

    Rejects unknown keys; raises ``ScenarioError`` with the offending
    location (JSON syntax errors keep their line/column context).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc

    _require(isinstance(data, dict), f"{path}: top level must be an object")
    unknown = set(data) - _TOP_KEYS
    _require(not unknown, f"{path}: unknown keys: {sorted(unknown)}")
    for key in _TOP_KEYS:
        _require(key in data, f"{path}: missing key {key!r}")
    _require(
        data["schema_version"] == SCHEMA_VERSION,
        f"{path}: unsupported schema_version {data['schema_version']!r}",
    )
    _require(isinstance(data["name"], str), f"{path}: name must be a string")
    _require(isinstance(data["services"], list), f"{path}: services must be a list")
    _require(isinstance(data["nodes"], list), f"{path}: nodes must be a list")
    _require(isinstance(data["counts"], dict), f"{path}: counts must be an object")

    services = []
    for i, entry in enumerate(data["services"]):
        where = f"{path}: services[{i}]"
        _require(isinstance(entry, dict), f"{where} must be an object")
        unknown = set(entry) - _SERVICE_KEYS
        _require(not unknown, f"{where}: unknown keys: {sorted(unknown)}")
        for key in ("id", "process_time", "deadline"):
            _require(key in entry, f"{where}: missing key {key!r}")
        _require(isinstance(entry["id"], str), f"{where}: id must be a string")
        for key in ("process_time", "deadline"):
            value = entry[key]
            _require(
                isinstance(value, (int, float)) and not isinstance(value, bool),
                f"{where}: {key} must be a number",
            )
        pixel = entry.get("pixel_count")
        _require(
            pixel is None or (isinstance(pixel, int) and not isinstance(pixel, bool)),
            f"{where}: pixel_count must be an integer",
        )
        environment = entry.get("environment")
        _require(
            environment is None or isinstance(environment, str),
            f"{where}: environment must be a string",
        )
        services.append(
            ServiceSpec(
                id=entry["id"],
                process_time=entry["process_time"],
                deadline=entry["deadline"],
                pixel_count=pixel,
                environment=environment,
            )
        )

    nodes = []
    for i, node in enumerate(data["nodes"]):
        _require(isinstance(node, str), f"{path}: nodes[{i}] must be a string")
        nodes.append(node)

    counts: dict[str, dict[str, int]] = {}
    for node, row in data["counts"].items():
        _require(isinstance(row, dict), f"{path}: counts[{node!r}] must be an object")
        counts[node] = dict(row)

    config = ScenarioConfig(
        name=data["name"], services=services, nodes=nodes, counts=counts
    )
    try:
        config.validate()
    except ScenarioError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    return config


def write_scenario_file(config: ScenarioConfig, path: str | Path) -> None:
    """Serialize ``config`` so that ``parse_scenario_file`` round-trips it."""
    config.validate()
    services = []
    for svc in config.services:
        entry: dict = {
            "id": svc.id,
            "process_time": svc.process_time,
            "deadline": svc.deadline,
        }
        if svc.pixel_count is not None:
            entry["pixel_count"] = svc.pixel_count
        if svc.environment is not None:
            entry["environment"] = svc.environment
        services.append(entry)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "name": config.name,
        "services": services,
        "nodes": list(config.nodes),
        "counts": {node: dict(row) for node, row in config.counts.items()},
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
