import itertools

import pytest

from mecsim.queues import FifoQueue, PreferentialQueue, Request, RequestBlock

_ids = itertools.count(1000)


def _request(process_time, deadline_end, arrival=0, rid=None):
    return Request(
        id=next(_ids) if rid is None else rid,
        service_id="svc",
        origin_node="M1",
        arrival_time=arrival,
        process_time=process_time,
        deadline_end=deadline_end,
    )


@pytest.fixture
def make_request():
    return _request


@pytest.fixture
def make_queue():
    """Factory for a queue preloaded with blocks given as (start, end) pairs.

    A third tuple element overrides the block's request deadline, which
    otherwise equals its end.
    """

    def _make(blocks=(), cpu_free_time=0, cls=PreferentialQueue):
        queue = cls(cpu_free_time)
        for i, spec in enumerate(blocks):
            start, end = spec[0], spec[1]
            deadline = spec[2] if len(spec) > 2 else end
            request = _request(end - start, deadline, rid=i + 1)
            block = RequestBlock(request)
            block.end = end
            queue._link(queue.last, block, None)
        return queue

    return _make


@pytest.fixture
def make_fifo(make_queue):
    def _make(blocks=(), cpu_free_time=0):
        return make_queue(blocks, cpu_free_time, cls=FifoQueue)

    return _make
