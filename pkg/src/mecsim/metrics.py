"""Aggregation of replication outcomes and CSV reporting."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from pathlib import Path

from .simulation import GENERATOR_NAME, ReplicationResult

CSV_HEADER = (
    "scenario,policy,reps,met_rate,met_sd,forward_rate,forward_sd,"
    "total_requests,seed,generator"
)


@dataclass
class AggregateStats:
    """Mean and sample standard deviation of both rates over replications.

    ``forward_rate`` uses the maximum possible number of forwards
    (``max_forwards`` x total requests) as its denominator; with zero
    allowed forwards the rate is reported as 0.  ``per_node`` carries
    mean per-node counts for transparency; it is not part of the CSV.
    """

    scenario: str
    policy: str
    replications: int
    met_rate: float
    met_sd: float
    forward_rate: float
    forward_sd: float
    total_requests: int
    seed: int
    generator: str = GENERATOR_NAME
    per_node: dict[str, dict[str, float]] = field(default_factory=dict)


def aggregate(
    results: list[ReplicationResult], scenario: str, policy: str
) -> AggregateStats:
    """Fold replication results for one (scenario, policy) pair.

    The list must be nonempty and homogeneous.  A single replication
    reports a standard deviation of 0 by convention.
    """
    if not results:
        raise ValueError("aggregate needs at least one replication result")
    for r in results:
        if r.scenario != scenario or r.policy != policy:
            raise ValueError(
                f"mixed results: expected ({scenario}, {policy}), "
                f"got ({r.scenario}, {r.policy})"
            )
    totals = {r.requests for r in results}
    if len(totals) != 1:
        raise ValueError("replications disagree on total request count")
    masters = {r.master_seed for r in results}
    if len(masters) != 1:
        raise ValueError("replications disagree on master seed")

    met_rates = [r.met_rate for r in results]
    forward_rates = [r.forward_rate for r in results]

    def sd(values: list[float]) -> float:
        return statistics.stdev(values) if len(values) > 1 else 0.0

    node_ids = results[0].per_node.keys()
    per_node = {
        nid: {
            "processed": statistics.fmean(r.per_node[nid].processed for r in results),
            "met": statistics.fmean(r.per_node[nid].met for r in results),
            "missed": statistics.fmean(r.per_node[nid].missed for r in results),
            "forwards_out": statistics.fmean(
                r.per_node[nid].forwards_out for r in results
            ),
        }
        for nid in node_ids
    }

    return AggregateStats(
        scenario=scenario,
        policy=policy,
        replications=len(results),
        met_rate=statistics.fmean(met_rates),
        met_sd=sd(met_rates),
        forward_rate=statistics.fmean(forward_rates),
        forward_sd=sd(forward_rates),
        total_requests=totals.pop(),
        seed=masters.pop(),
        per_node=per_node,
    )


def write_csv(stats: list[AggregateStats], path: str | Path) -> None:
    """Write one data row per (scenario, policy); rates get 6 decimals."""
    lines = [CSV_HEADER]
    for s in stats:
        lines.append(
            f"{s.scenario},{s.policy},{s.replications},"
            f"{s.met_rate:.6f},{s.met_sd:.6f},"
            f"{s.forward_rate:.6f},{s.forward_sd:.6f},"
            f"{s.total_requests},{s.seed},{s.generator}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
