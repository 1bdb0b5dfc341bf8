"""Deadline-aware scheduling queues for simulated edge nodes.

Two per-node schedule structures share one block representation:

* ``PreferentialQueue`` admits a request only if it can finish by its
  deadline without delaying any block already scheduled.  Blocks may be
  separated by idle gaps; admission consumes gaps from the tail of the
  schedule first, shifting existing blocks earlier by exactly the
  missing amount.
* ``FifoQueue`` is the gap-free append-only baseline.

All times are absolute simulation instants (UT).  The schedule's left
boundary is ``cpu_free_time``: the earliest instant the CPU can start
its next block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple


@dataclass(slots=True)
class Request:
    """One unit of work submitted to the cluster.

    ``process_time`` is the worst-case execution time; ``deadline_end``
    is absolute (arrival time plus the service deadline).
    ``forward_count`` is bumped once per hop while the request travels
    between nodes.
    """

    id: int
    service_id: str
    origin_node: str
    arrival_time: float
    process_time: float
    deadline_end: float
    forward_count: int = 0


class AdmitKind(Enum):
    ADMITTED = "admitted"
    REJECTED = "rejected"
    FORCED = "forced"


@dataclass(slots=True, frozen=True)
class AdmitOutcome:
    """Result of an admission attempt.

    ``scheduled_end`` is present for ADMITTED and FORCED.  An ADMITTED
    end never exceeds the request deadline; a FORCED end may.
    """

    kind: AdmitKind
    scheduled_end: float | None = None


class RequestBlock:
    """A scheduled time interval for one request, doubly linked.

    Only the end instant is stored; the start is derived from the fixed
    processing time.  A block that has not been linked into a queue yet
    carries the latest end its deadline allows.
    """

    __slots__ = ("request", "end", "left", "right")

    def __init__(self, request: Request):
        self.request = request
        self.end: float = request.deadline_end
        self.left: RequestBlock | None = None
        self.right: RequestBlock | None = None

    @property
    def start(self) -> float:
        return self.end - self.request.process_time

    @property
    def size(self) -> float:
        return self.request.process_time

    def __repr__(self) -> str:
        return f"RequestBlock(id={self.request.id}, [{self.start}, {self.end}])"


class UsefulArea(NamedTuple):
    width: float
    end: float


def useful_area(
    left: RequestBlock | None,
    right: RequestBlock | None,
    new_block: RequestBlock,
    cpu_free_time: float,
) -> UsefulArea:
    """Usable width of the gap between ``left`` and ``right`` for ``new_block``.

    The gap runs from ``left``'s end (or ``cpu_free_time``) to
    ``right``'s start (or infinity), capped by the new request's
    deadline.  Degenerate orderings collapse to ``(0, 0)``.  Pure; no
    mutation.
    """
    start = left.end if left is not None else cpu_free_time
    end = right.start if right is not None else math.inf
    end = min(end, new_block.request.deadline_end)
    if start > end:
        return UsefulArea(0, 0)
    return UsefulArea(end - start, end)


class _ScheduleQueue:
    """Shared linked-block machinery for both queue flavours."""

    __slots__ = ("first", "last", "cpu_free_time", "_total_size", "_last_advance")

    def __init__(self, cpu_free_time: float = 0):
        self.first: RequestBlock | None = None
        self.last: RequestBlock | None = None
        self.cpu_free_time = cpu_free_time
        self._total_size: float = 0  # sum of scheduled process times
        self._last_advance: float = -math.inf

    def is_empty(self) -> bool:
        return self.first is None

    def blocks(self) -> Iterator[RequestBlock]:
        block = self.first
        while block is not None:
            yield block
            block = block.right

    def __len__(self) -> int:
        return sum(1 for _ in self.blocks())

    def total_scheduled_time(self) -> float:
        return self._total_size

    def snapshot(self) -> list[tuple[int, float, float, float]]:
        """(request id, start, end, deadline_end) per block, head to tail."""
        return [
            (b.request.id, b.start, b.end, b.request.deadline_end)
            for b in self.blocks()
        ]

    def dump(self) -> str:
        """Diagnostic text dump, one line per block: id start end deadline_end."""
        lines = [
            f"{b.request.id} {b.start} {b.end} {b.request.deadline_end}"
            for b in self.blocks()
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    def _link(
        self,
        left: RequestBlock | None,
        block: RequestBlock,
        right: RequestBlock | None,
    ) -> None:
        block.left = left
        block.right = right
        if left is not None:
            left.right = block
        else:
            self.first = block
        if right is not None:
            right.left = block
        else:
            self.last = block
        self._total_size += block.request.process_time

    def advance(self, now: float) -> list[RequestBlock]:
        """Remove and return all blocks completed by ``now``, head order.

        ``cpu_free_time`` rises to ``now``, but never past the start of
        a block that is still scheduled (a block being executed pins the
        boundary at its own start).  ``now`` must not decrease across
        calls.
        """
        if now < self._last_advance:
            raise ValueError(
                f"advance time went backwards: {now} < {self._last_advance}"
            )
        self._last_advance = now
        done: list[RequestBlock] = []
        block = self.first
        while block is not None and block.end <= now:
            nxt = block.right
            block.left = None
            block.right = None
            self._total_size -= block.request.process_time
            done.append(block)
            block = nxt
        self.first = block
        if block is not None:
            block.left = None
            boundary = min(now, block.start)
        else:
            self.last = None
            boundary = now
        if boundary > self.cpu_free_time:
            self.cpu_free_time = boundary
        return done


class PreferentialQueue(_ScheduleQueue):
    """Schedule with deadline-capped gap insertion.

    A new block lands at the rightmost point of the schedule where it
    can still finish on time: its end is ``min(deadline, start of the
    right neighbour)``.  When the enclosing gap is too small, blocks on
    the left are shifted earlier, consuming older gaps right-to-left, by
    exactly the missing amount.  No operation ever moves an existing
    block's end later, and a rejected attempt leaves the queue
    untouched.
    """

    __slots__ = ()

    def try_admit(self, request: Request, now: float = 0) -> AdmitOutcome:
        """Admit ``request`` if it can meet its deadline, else reject.

        ``cpu_free_time`` is authoritative for placement; ``now`` is
        accepted for interface symmetry with the simulator, which calls
        ``advance`` before every attempt.
        """
        size = request.process_time
        deadline = request.deadline_end
        cpu = self.cpu_free_time
        last = self.last

        if last is None:
            if cpu + size <= deadline:
                block = RequestBlock(request)
                block.end = deadline
                self._link(None, block, None)
                return AdmitOutcome(AdmitKind.ADMITTED, block.end)
            return AdmitOutcome(AdmitKind.REJECTED)

        # Cheap impossibility bound: all interior slack plus the room
        # between the tail and the deadline.
        interior = (last.end - cpu) - self._total_size
        extension = deadline - last.end
        if extension < 0:
            extension = 0
        if size > interior + extension:
            return AdmitOutcome(AdmitKind.REJECTED)

        # Find the insertion gap: rightmost gap with any deadline-capped
        # width.  Gaps wholly past the deadline are useless.
        place_left: RequestBlock | None = last
        place_right: RequestBlock | None = None
        place_end = 0.0
        width = 0.0
        while True:
            gap_start = place_left.end if place_left is not None else cpu
            gap_end = place_right.start if place_right is not None else math.inf
            if gap_end > deadline:
                gap_end = deadline
            if gap_end > gap_start:
                place_end = gap_end
                width = gap_end - gap_start
                break
            if place_left is None:
                return AdmitOutcome(AdmitKind.REJECTED)
            place_left, place_right = place_left.left, place_left

        shifts: list[tuple[RequestBlock, float]] = []
        if width < size:
            # Shift blocks left of the insertion point, absorbing the
            # deficit from the nearest gaps first.
            deficit = size - width
            block = place_left
            while True:
                if block is None:
                    return AdmitOutcome(AdmitKind.REJECTED)
                shifts.append((block, deficit))
                left_wall = block.left.end if block.left is not None else cpu
                room = block.start - left_wall
                if room >= deficit:
                    break
                deficit -= room
                block = block.left

        for block, amount in shifts:
            block.end -= amount
        new_block = RequestBlock(request)
        new_block.end = place_end
        self._link(place_left, new_block, place_right)
        return AdmitOutcome(AdmitKind.ADMITTED, place_end)

    def force_admit(self, request: Request, now: float = 0) -> AdmitOutcome:
        """Append ``request`` after removing every idle gap.

        All existing blocks are shifted left until the schedule is
        gap-free from ``cpu_free_time``; the new block goes at the tail
        and may miss its own deadline, but no existing end moves later.
        Meant for requests whose forwarding budget is exhausted.
        """
        cpu = self.cpu_free_time
        packed_end = cpu + self._total_size
        target = packed_end
        block = self.last
        while block is not None and block.end != target:
            block.end = target
            target -= block.request.process_time
            block = block.left
        new_block = RequestBlock(request)
        new_block.end = packed_end + request.process_time
        self._link(self.last, new_block, None)
        return AdmitOutcome(AdmitKind.FORCED, new_block.end)


class FifoQueue(_ScheduleQueue):
    """Gap-free append-only schedule used as the baseline policy."""

    __slots__ = ()

    def _append_point(self) -> float:
        tail_end = self.last.end if self.last is not None else self.cpu_free_time
        return max(self.cpu_free_time, tail_end)

    def fifo_feasible(self, request: Request, now: float = 0) -> bool:
        """Would an append finish by the request deadline?  No mutation."""
        return self._append_point() + request.process_time <= request.deadline_end

    def fifo_append(self, request: Request, now: float = 0) -> AdmitOutcome:
        """Append at the tail; ADMITTED if the deadline holds, else FORCED."""
        block = RequestBlock(request)
        block.end = self._append_point() + request.process_time
        self._link(self.last, block, None)
        kind = (
            AdmitKind.ADMITTED
            if block.end <= request.deadline_end
            else AdmitKind.FORCED
        )
        return AdmitOutcome(kind, block.end)
