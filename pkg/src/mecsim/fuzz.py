"""Seeded randomized cross-checks of the queues against their oracles.

Three drills, all deterministic for a given seed:

* admission/oracle equivalence on random queue states,
* long admit/force/advance interleavings with the validator run after
  every operation,
* forced admission versus a gap-free FIFO rebuild of the same blocks.

A deliberate fault can be injected (the admission gets one extra time
unit past the deadline) to confirm the drills actually catch bugs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Callable

from .oracle import oracle_feasible, validate_schedule
from .queues import AdmitKind, FifoQueue, PreferentialQueue, Request, RequestBlock


@dataclass
class FuzzReport:
    cases: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class QueueInstance:
    """A reproducible queue state plus one candidate request."""

    cpu_free_time: int
    blocks: tuple[tuple[int, int], ...]  # ordered (start, end)
    new_size: int
    deadline_end: int

    def build(self) -> PreferentialQueue:
        queue = PreferentialQueue(self.cpu_free_time)
        for i, (start, end) in enumerate(self.blocks):
            request = Request(
                id=i,
                service_id="fuzz",
                origin_node="F",
                arrival_time=0,
                process_time=end - start,
                deadline_end=end,
            )
            block = RequestBlock(request)
            block.end = end
            queue._link(queue.last, block, None)
        return queue

    def request(self, request_id: int = 10_000) -> Request:
        return Request(
            id=request_id,
            service_id="fuzz",
            origin_node="F",
            arrival_time=0,
            process_time=self.new_size,
            deadline_end=self.deadline_end,
        )


def random_instance(
    rng: random.Random, max_blocks: int = 12, max_time: int = 500
) -> QueueInstance:
    """Draw a valid queue state with a mix of tight and loose gaps."""
    cpu = rng.randint(0, max_time // 8)
    n = rng.randint(0, max_blocks)
    max_size = max(2, max_time // (max_blocks + 2))
    pos = cpu
    blocks = []
    for _ in range(n):
        pos += rng.choice((0, 0, rng.randint(0, max_size)))
        size = rng.randint(1, max_size)
        blocks.append((pos, pos + size))
        pos += size
    new_size = rng.randint(1, max_size + 2)
    # Bias deadlines towards the contested region around the schedule.
    deadline = rng.randint(cpu, pos + 2 * max_size)
    return QueueInstance(cpu, tuple(blocks), new_size, deadline)


def _shrink(
    instance: QueueInstance, disagrees: Callable[[QueueInstance], bool]
) -> QueueInstance:
    """Greedy shrink: drop blocks, then trim sizes, while still failing."""
    current = instance
    changed = True
    while changed:
        changed = False
        for i in range(len(current.blocks)):
            candidate = replace(
                current, blocks=current.blocks[:i] + current.blocks[i + 1 :]
            )
            if disagrees(candidate):
                current = candidate
                changed = True
                break
        if not changed and current.new_size > 1:
            candidate = replace(current, new_size=current.new_size - 1)
            if disagrees(candidate):
                current = candidate
                changed = True
    return current


def check_instance(instance: QueueInstance, extra_deadline: int = 0) -> str | None:
    """Compare one admission attempt against the oracle and validator.

    Returns a description of the first disagreement, or None.
    ``extra_deadline`` widens the deadline the queue sees (fault
    injection); the oracle always judges the true deadline.
    """
    queue = instance.build()
    before = queue.snapshot()
    expected = oracle_feasible(
        list(instance.blocks),
        instance.new_size,
        instance.deadline_end,
        instance.cpu_free_time,
    )
    request = instance.request()
    if extra_deadline:
        attempt = replace(request, deadline_end=request.deadline_end + extra_deadline)
    else:
        attempt = request
    outcome = queue.try_admit(attempt)
    admitted = outcome.kind is AdmitKind.ADMITTED

    if admitted != expected:
        return (
            f"oracle says {'feasible' if expected else 'infeasible'} but "
            f"try_admit {'admitted' if admitted else 'rejected'}: {instance}"
        )
    if admitted:
        if outcome.scheduled_end > instance.deadline_end:
            return f"admitted past the deadline: {outcome} for {instance}"
        problems = validate_schedule(queue, prior=before)
        if problems:
            return f"invariants broken after admit: {problems[0]} for {instance}"
        sizes = sorted(e - s for s, e in instance.blocks)
        post = sorted(
            end - start
            for rid, start, end, _deadline in queue.snapshot()
            if rid != request.id
        )
        if sizes != post:
            return f"block sizes not conserved: {instance}"
    else:
        if queue.snapshot() != before:
            return f"queue mutated by a rejection: {instance}"
    return None


def run_oracle_equivalence(
    cases: int,
    seed: int,
    max_blocks: int = 12,
    max_time: int = 500,
    inject_fault: bool = False,
) -> FuzzReport:
    """Fuzz admission against the oracle; shrink the first failure found."""
    rng = random.Random(seed)
    extra = 1 if inject_fault else 0
    report = FuzzReport()
    for _ in range(cases):
        report.cases += 1
        instance = random_instance(rng, max_blocks, max_time)
        problem = check_instance(instance, extra)
        if problem:
            small = _shrink(instance, lambda c: check_instance(c, extra) is not None)
            report.failures.append(
                f"{problem}\n  minimal counterexample: {small}\n"
                f"  ({check_instance(small, extra)})"
            )
            break
    return report


def run_invariant_fuzz(operations: int, seed: int) -> FuzzReport:
    """Random admit/force/advance interleavings, validated after every op."""
    rng = random.Random(seed)
    report = FuzzReport()
    queue = PreferentialQueue()
    clock = 0
    next_id = 0
    scheduled = 0  # live process-time total, tracked independently

    for _ in range(operations):
        report.cases += 1
        before = queue.snapshot()
        roll = rng.random()
        if roll < 0.70:
            size = rng.randint(1, 40)
            deadline = clock + rng.randint(1, 400)
            request = Request(next_id, "fuzz", "F", clock, size, deadline)
            next_id += 1
            outcome = queue.try_admit(request, clock)
            if outcome.kind is AdmitKind.ADMITTED:
                scheduled += size
                if outcome.scheduled_end > deadline:
                    report.failures.append(f"admitted past deadline at op {report.cases}")
            else:
                if queue.snapshot() != before:
                    report.failures.append(f"mutation on reject at op {report.cases}")
                if rng.random() < 0.4:
                    before = queue.snapshot()
                    queue.force_admit(request, clock)
                    scheduled += size
        elif roll < 0.85 and before:
            size = rng.randint(1, 40)
            request = Request(next_id, "fuzz", "F", clock, size, clock + 1)
            next_id += 1
            queue.force_admit(request, clock)
            scheduled += size
        else:
            clock += rng.randint(0, 120)
            for block in queue.advance(clock):
                scheduled -= block.request.process_time
                if block.end > clock:
                    report.failures.append(f"drained unfinished block at op {report.cases}")

        problems = validate_schedule(queue, prior=before)
        if problems:
            report.failures.append(f"op {report.cases}: {problems[0]}")
        if queue.total_scheduled_time() != scheduled:
            report.failures.append(f"scheduled-time ledger drifted at op {report.cases}")
        if report.failures:
            break
    return report


def run_forced_fifo(cases: int, seed: int) -> FuzzReport:
    """Forced admission must equal a gap-free FIFO rebuild plus append."""
    rng = random.Random(seed)
    report = FuzzReport()
    for _ in range(cases):
        report.cases += 1
        instance = random_instance(rng)
        queue = instance.build()
        order = [block.request for block in queue.blocks()]
        queue.force_admit(instance.request())
        forced_ends = [block.end for block in queue.blocks()]

        fifo = FifoQueue(instance.cpu_free_time)
        for request in order:
            fifo.fifo_append(request)
        fifo.fifo_append(instance.request())
        fifo_ends = [block.end for block in fifo.blocks()]

        if forced_ends != fifo_ends:
            report.failures.append(
                f"forced ends {forced_ends} != fifo ends {fifo_ends}: {instance}"
            )
            break
    return report
