"""Independent checkers for the scheduling queues.

``oracle_feasible`` restates admissibility as a closed-form existence
test over insertion positions; ``exhaustive_feasible`` searches every
insertion position and every integer left-shift assignment outright.
``validate_schedule`` inspects a live queue for structural violations.
All of it is pure and deliberately ignorant of how the queues place
blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .queues import FifoQueue, PreferentialQueue


class ViolationKind(Enum):
    OVERLAP = "overlap"
    ORDER_BROKEN = "order_broken"
    BEFORE_CPU_FREE = "before_cpu_free"
    LINK_BROKEN = "link_broken"
    DEADLINE_REGRESSION = "deadline_regression"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str


def _check_blocks(blocks: list[tuple[float, float]]) -> None:
    prev_end = -math.inf
    for i, (start, end) in enumerate(blocks):
        if end <= start:
            raise ValueError(f"block {i} has nonpositive length: ({start}, {end})")
        if start < prev_end:
            raise ValueError(f"block {i} overlaps or disorders its predecessor")
        prev_end = end


def oracle_feasible(
    blocks: list[tuple[float, float]],
    new_size: float,
    deadline_end: float,
    cpu_free_time: float,
) -> bool:
    """Can a block of ``new_size`` be inserted without delaying anyone?

    Feasible iff some insertion position ``k`` satisfies
    ``cpu_free_time + (sum of the first k sizes) + new_size <=
    min(deadline_end, start of block k+1)``: packing the prefix hard
    left frees the most room and never delays a block.  ``blocks`` are
    ordered ``(start, end)`` pairs; overlapping input raises.
    """
    _check_blocks(blocks)
    n = len(blocks)
    packed = cpu_free_time
    for k in range(n + 1):
        limit = blocks[k][0] if k < n else math.inf
        if limit > deadline_end:
            limit = deadline_end
        if packed + new_size <= limit:
            return True
        if k < n:
            packed += blocks[k][1] - blocks[k][0]
    return False


def exhaustive_feasible(
    blocks: list[tuple[int, int]],
    new_size: int,
    deadline_end: int,
    cpu_free_time: int,
) -> bool:
    """Brute-force reference for ``oracle_feasible`` on integer instances.

    Tries every insertion slot and, for every block, every integer end
    no later than its current one (order preserved, no overlap, nothing
    before ``cpu_free_time``).  Exponential without the memo; intended
    for small instances only.
    """
    _check_blocks(blocks)
    for value in (new_size, deadline_end, cpu_free_time, *(t for b in blocks for t in b)):
        if not isinstance(value, int):
            raise ValueError("exhaustive search requires integer times")
    n = len(blocks)
    sizes = [end - start for start, end in blocks]

    for k in range(n + 1):
        max_ends = [blocks[i][1] for i in range(k)] + [deadline_end]
        max_ends += [blocks[i][1] for i in range(k, n)]
        seq_sizes = sizes[:k] + [new_size] + sizes[k:]
        memo: dict[tuple[int, int], bool] = {}

        def fits(i: int, cap: int) -> bool:
            if i < 0:
                return True
            hi = min(max_ends[i], cap)
            lo = cpu_free_time + seq_sizes[i]
            if hi < lo:
                return False
            key = (i, hi)
            cached = memo.get(key)
            if cached is not None:
                return cached
            ok = False
            for end in range(hi, lo - 1, -1):
                if fits(i - 1, end - seq_sizes[i]):
                    ok = True
                    break
            memo[key] = ok
            return ok

        if fits(n, max_ends[n]):
            return True
    return False


def validate_schedule(
    queue: PreferentialQueue | FifoQueue,
    prior: list[tuple[int, float, float, float]] | None = None,
) -> list[Violation]:
    """Return every invariant violation found in ``queue``.

    Checks link symmetry, head/tail bookkeeping, block ordering and
    overlap, and the ``cpu_free_time`` boundary.  Given a ``prior``
    snapshot, also flags any surviving block whose end moved later
    (deadline regression).  An empty list means the queue is sound.
    """
    violations: list[Violation] = []

    if (queue.first is None) != (queue.last is None):
        violations.append(
            Violation(ViolationKind.LINK_BROKEN, "first/last presence mismatch")
        )
        return violations

    order: list = []
    seen: set[int] = set()
    block = queue.first
    if block is not None and block.left is not None:
        violations.append(
            Violation(ViolationKind.LINK_BROKEN, "head block has a left link")
        )
    while block is not None:
        if id(block) in seen:
            violations.append(
                Violation(ViolationKind.LINK_BROKEN, "cycle in block links")
            )
            return violations
        seen.add(id(block))
        order.append(block)
        if block.right is not None and block.right.left is not block:
            violations.append(
                Violation(
                    ViolationKind.LINK_BROKEN,
                    f"asymmetric link at request {block.request.id}",
                )
            )
        if block.right is None and queue.last is not block:
            violations.append(
                Violation(ViolationKind.LINK_BROKEN, "tail pointer mismatch")
            )
        block = block.right

    for a, b in zip(order, order[1:]):
        if a.end > b.start:
            violations.append(
                Violation(
                    ViolationKind.OVERLAP,
                    f"request {a.request.id} ends {a.end} after "
                    f"request {b.request.id} starts {b.start}",
                )
            )
        elif a.start > b.start or a.end > b.end:
            violations.append(
                Violation(
                    ViolationKind.ORDER_BROKEN,
                    f"requests {a.request.id} and {b.request.id} out of order",
                )
            )

    for b in order:
        if b.start < queue.cpu_free_time:
            violations.append(
                Violation(
                    ViolationKind.BEFORE_CPU_FREE,
                    f"request {b.request.id} starts {b.start} before "
                    f"cpu_free_time {queue.cpu_free_time}",
                )
            )

    if prior is not None:
        prior_ends = {rid: end for rid, _start, end, _dl in prior}
        for b in order:
            old = prior_ends.get(b.request.id)
            if old is not None and b.end > old:
                violations.append(
                    Violation(
                        ViolationKind.DEADLINE_REGRESSION,
                        f"request {b.request.id} end moved later: {old} -> {b.end}",
                    )
                )

    return violations
