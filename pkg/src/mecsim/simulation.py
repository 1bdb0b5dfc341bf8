"""Cluster simulation of the sequential-forwarding policy.

Every replication owns all of its state: a fresh request stream, one
queue per node, and a seeded RNG.  A node that predicts a deadline miss
forwards the request to a random neighbour; after ``max_forwards`` hops
the last node must process it even if the deadline is lost.  Forwarding
costs no simulated time and never changes a request's deadline.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .queues import AdmitKind, FifoQueue, PreferentialQueue, Request
from .workload import ScenarioConfig, ScenarioError, generate_requests

# random.Random is a Mersenne Twister; the name is recorded in outputs
# so results can be tied to the generator that produced them.
GENERATOR_NAME = "mt19937"

POLICY_FIFO = "fifo"
POLICY_PREFERENTIAL = "preferential"
POLICIES = (POLICY_FIFO, POLICY_PREFERENTIAL)

ARRIVAL_BATCH = "batch_at_zero"
ARRIVAL_UNIFORM = "uniform_horizon"
ARRIVAL_MODELS = (ARRIVAL_BATCH, ARRIVAL_UNIFORM)


@dataclass
class SimParams:
    """Knobs shared by every replication of a run.

    ``seed`` is the master seed; each replication uses
    ``derive_seed(seed, index)``.  ``exclude_origin`` removes the
    original node from the forwarding candidates of later hops.
    """

    max_forwards: int = 2
    queue_policy: str = POLICY_PREFERENTIAL
    arrival_model: str = ARRIVAL_BATCH
    horizon: float = 0
    seed: int = 0
    exclude_origin: bool = False

    def validate(self) -> None:
        if self.max_forwards < 0:
            raise ScenarioError("max_forwards must be >= 0")
        if self.queue_policy not in POLICIES:
            raise ScenarioError(f"unknown queue policy: {self.queue_policy!r}")
        if self.arrival_model not in ARRIVAL_MODELS:
            raise ScenarioError(f"unknown arrival model: {self.arrival_model!r}")
        if self.arrival_model == ARRIVAL_UNIFORM and self.horizon <= 0:
            raise ScenarioError("uniform_horizon requires horizon > 0")


def derive_seed(master_seed: int, replication_index: int) -> int:
    """Sub-seed for one replication: master XOR replication index."""
    return master_seed ^ replication_index


@dataclass
class NodeState:
    """One MEC node: its schedule plus running counters."""

    id: str
    queue: PreferentialQueue | FifoQueue
    admitted: int = 0
    forced: int = 0
    forwards_out: int = 0
    met: int = 0
    missed: int = 0

    def drain(
        self,
        now: float,
        trace: Callable[[float, str, int, str], None] | None = None,
    ) -> None:
        """Advance the queue to ``now`` and fold completions into counters."""
        for block in self.queue.advance(now):
            if block.end <= block.request.deadline_end:
                self.met += 1
            else:
                self.missed += 1
            if trace:
                trace(block.end, self.id, block.request.id, "complete")


@dataclass
class NodeTotals:
    """Per-node outcome of a finished replication."""

    processed: int = 0
    met: int = 0
    missed: int = 0
    forwards_out: int = 0


@dataclass
class ReplicationResult:
    """Outcome of a single replication."""

    scenario: str
    policy: str
    master_seed: int
    seed: int
    max_forwards: int
    requests: int
    met: int
    missed: int
    forwards: int
    per_node: dict[str, NodeTotals] = field(default_factory=dict)

    @property
    def met_rate(self) -> float:
        return self.met / self.requests if self.requests else 0.0

    @property
    def forward_rate(self) -> float:
        ceiling = self.max_forwards * self.requests
        return self.forwards / ceiling if ceiling else 0.0


@dataclass
class Cluster:
    """Shared view dispatch needs: the nodes plus run-wide counters."""

    nodes: dict[str, NodeState]
    node_ids: list[str]
    params: SimParams
    forwards: int = 0


def pick_neighbor(rng: random.Random, nodes: Sequence[str], current: str) -> str:
    """Uniform choice among ``nodes`` other than ``current``; one rng draw."""
    others = [n for n in nodes if n != current]
    if not others:
        raise ValueError("forwarding requires at least two nodes")
    return others[rng.randrange(len(others))]


def dispatch(
    request: Request,
    node: NodeState,
    cluster: Cluster,
    rng: random.Random,
    trace: Callable[[float, str, int, str], None] | None = None,
) -> str:
    """Route one request until some node takes it; return that node's id.

    At each visited node the queue is advanced to the arrival instant
    and an admission is attempted.  On rejection the request hops to a
    random neighbour while its forwarding budget lasts; afterwards the
    current node is forced to schedule it.
    """
    params = cluster.params
    t = request.arrival_time
    fifo = params.queue_policy == POLICY_FIFO
    while True:
        queue = node.queue
        node.drain(t, trace)
        if fifo:
            if queue.fifo_feasible(request, t):
                queue.fifo_append(request, t)
                admitted = True
            else:
                admitted = False
        else:
            admitted = queue.try_admit(request, t).kind is AdmitKind.ADMITTED
        if admitted:
            node.admitted += 1
            if trace:
                trace(t, node.id, request.id, "admit")
            return node.id
        if trace:
            trace(t, node.id, request.id, "reject")

        if request.forward_count < params.max_forwards:
            pool = cluster.node_ids
            if params.exclude_origin and node.id != request.origin_node:
                pool = [n for n in pool if n != request.origin_node]
            if any(n != node.id for n in pool):
                request.forward_count += 1
                node.forwards_out += 1
                cluster.forwards += 1
                target = pick_neighbor(rng, pool, node.id)
                if trace:
                    trace(t, node.id, request.id, f"forward->{target}")
                node = cluster.nodes[target]
                continue

        if fifo:
            queue.fifo_append(request, t)
        else:
            queue.force_admit(request, t)
        node.forced += 1
        if trace:
            trace(t, node.id, request.id, "force")
        return node.id


def run_replication(
    scenario: ScenarioConfig,
    params: SimParams,
    seed: int,
    trace: Callable[[float, str, int, str], None] | None = None,
) -> ReplicationResult:
    """Simulate one full replication; identical inputs give identical results.

    ``seed`` is this replication's sub-seed (see ``derive_seed``).  The
    stream is generated first, so two runs with equal seeds but
    different policies consume the same request list; only forwarding
    destinations are drawn during dispatch.
    """
    scenario.validate()
    params.validate()
    rng = random.Random(seed)
    stream = generate_requests(scenario, params, rng)

    make_queue = FifoQueue if params.queue_policy == POLICY_FIFO else PreferentialQueue
    nodes = {nid: NodeState(nid, make_queue()) for nid in scenario.nodes}
    cluster = Cluster(nodes=nodes, node_ids=list(scenario.nodes), params=params)

    for request in stream:
        dispatch(request, nodes[request.origin_node], cluster, rng, trace)

    total = len(stream)
    met = missed = 0
    per_node: dict[str, NodeTotals] = {}
    for nid in scenario.nodes:
        node = nodes[nid]
        node.drain(math.inf, trace)
        # Admission implies the deadline holds; forcing implies it cannot.
        assert node.met == node.admitted and node.missed == node.forced
        met += node.met
        missed += node.missed
        per_node[nid] = NodeTotals(
            processed=node.met + node.missed,
            met=node.met,
            missed=node.missed,
            forwards_out=node.forwards_out,
        )

    assert met + missed == total, "request lost or duplicated during dispatch"
    assert cluster.forwards <= params.max_forwards * total

    return ReplicationResult(
        scenario=scenario.name,
        policy=params.queue_policy,
        master_seed=params.seed,
        seed=seed,
        max_forwards=params.max_forwards,
        requests=total,
        met=met,
        missed=missed,
        forwards=cluster.forwards,
        per_node=per_node,
    )


def _replication_task(
    args: tuple[ScenarioConfig, SimParams, int, str | None],
) -> ReplicationResult:
    scenario, params, seed, trace_path = args
    if trace_path is None:
        return run_replication(scenario, params, seed)
    with open(trace_path, "w", encoding="utf-8") as fh:

        def trace(time: float, node: str, request_id: int, action: str) -> None:
            fh.write(f"{time} {node} {request_id} {action}\n")

        return run_replication(scenario, params, seed, trace)


def run_many(
    scenario: ScenarioConfig,
    params: SimParams,
    replications: int,
    workers: int = 1,
    trace_dir: str | None = None,
) -> list[ReplicationResult]:
    """Run ``replications`` independent replications, ordered by index.

    With ``workers`` > 1 the replications fan out to a process pool;
    results are still assembled in index order, so the outcome does not
    depend on the worker count.  ``trace_dir`` writes one event trace
    file per replication (``trace_rep000.txt``, ...).
    """
    if replications < 1:
        raise ScenarioError("replications must be >= 1")
    tasks = []
    for i in range(replications):
        trace_path = None
        if trace_dir is not None:
            trace_path = str(Path(trace_dir) / f"trace_rep{i:03d}.txt")
        tasks.append((scenario, params, derive_seed(params.seed, i), trace_path))
    if workers <= 1:
        return [_replication_task(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_replication_task, tasks))
