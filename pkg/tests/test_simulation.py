import random

import pytest

from mecsim.queues import FifoQueue, PreferentialQueue, Request
from mecsim.simulation import (
    Cluster,
    NodeState,
    SimParams,
    derive_seed,
    dispatch,
    pick_neighbor,
    run_many,
    run_replication,
)
from mecsim.workload import ScenarioConfig, ServiceSpec, builtin_scenario, generate_requests


def tiny_scenario(counts, nodes=("A", "B"), deadline=4000):
    services = [ServiceSpec("S", 20, deadline)]
    return ScenarioConfig(
        name="tiny",
        services=services,
        nodes=list(nodes),
        counts={n: {"S": counts.get(n, 0)} for n in nodes},
    )


def saturated_queue(deadline_end=4000):
    """A queue no further request of the test sizes can ever join."""
    queue = PreferentialQueue()
    queue.force_admit(Request(999, "S", "A", 0, deadline_end + 100, deadline_end))
    return queue


class TestPickNeighbor:
    def test_two_nodes_forces_the_other(self):
        rng = random.Random(1)
        for _ in range(10):
            assert pick_neighbor(rng, ["M1", "M2"], "M1") == "M2"

    def test_uniform_across_three_nodes(self):
        rng = random.Random(99)
        counts = {"M2": 0, "M3": 0}
        draws = 60_000
        for _ in range(draws):
            counts[pick_neighbor(rng, ["M1", "M2", "M3"], "M1")] += 1
        # 3 sigma for Binomial(60000, 1/2) is ~367
        assert abs(counts["M2"] - 30_000) <= 400
        assert counts["M2"] + counts["M3"] == draws

    def test_fixed_seed_reproduces_sequence(self):
        nodes = ["M1", "M2", "M3", "M4"]
        rng = random.Random(5)
        seq1 = [pick_neighbor(rng, nodes, "M2") for _ in range(20)]
        rng = random.Random(5)
        seq2 = [pick_neighbor(rng, nodes, "M2") for _ in range(20)]
        assert seq1 == seq2

    def test_single_node_is_an_error(self):
        with pytest.raises(ValueError):
            pick_neighbor(random.Random(0), ["M1"], "M1")


class TestDispatch:
    def _cluster(self, queues, params):
        nodes = {nid: NodeState(nid, q) for nid, q in queues.items()}
        return nodes, Cluster(nodes=nodes, node_ids=list(queues), params=params)

    def test_admit_at_first_node_means_no_hops(self, make_request):
        params = SimParams(max_forwards=2, seed=0)
        nodes, cluster = self._cluster(
            {"A": PreferentialQueue(), "B": PreferentialQueue()}, params
        )
        request = make_request(20, 4000)
        terminal = dispatch(request, nodes["A"], cluster, random.Random(0))
        assert terminal == "A"
        assert request.forward_count == 0
        assert cluster.forwards == 0

    def test_reject_at_origin_admit_at_neighbor(self, make_request):
        params = SimParams(max_forwards=2, seed=0)
        nodes, cluster = self._cluster(
            {"A": saturated_queue(), "B": PreferentialQueue()}, params
        )
        request = make_request(20, 4000)
        terminal = dispatch(request, nodes["A"], cluster, random.Random(0))
        assert terminal == "B"
        assert request.forward_count == 1
        assert cluster.forwards == 1
        assert nodes["A"].forwards_out == 1
        assert nodes["B"].admitted == 1

    def test_reject_everywhere_forces_after_max_hops(self, make_request):
        params = SimParams(max_forwards=2, seed=0)
        nodes, cluster = self._cluster(
            {"A": saturated_queue(), "B": saturated_queue(), "C": saturated_queue()},
            params,
        )
        request = make_request(20, 4000)
        terminal = dispatch(request, nodes["A"], cluster, random.Random(0))
        assert request.forward_count == 2
        assert cluster.forwards == 2
        assert nodes[terminal].forced == 1

    def test_zero_budget_forces_at_origin(self, make_request):
        params = SimParams(max_forwards=0, seed=0)
        nodes, cluster = self._cluster(
            {"A": saturated_queue(), "B": PreferentialQueue()}, params
        )
        request = make_request(20, 4000)
        terminal = dispatch(request, nodes["A"], cluster, random.Random(0))
        assert terminal == "A"
        assert cluster.forwards == 0
        assert nodes["A"].forced == 1

    def test_exclude_origin_keeps_request_away(self, make_request):
        params = SimParams(max_forwards=5, seed=0, exclude_origin=True)
        nodes, cluster = self._cluster(
            {"A": saturated_queue(), "B": saturated_queue(), "C": saturated_queue()},
            params,
        )
        request = make_request(20, 4000)
        trail = []
        dispatch(
            request,
            nodes["A"],
            cluster,
            random.Random(0),
            trace=lambda t, node, rid, action: trail.append((node, action)),
        )
        visited_after_leaving = [n for n, a in trail if a == "reject"][1:]
        assert "A" not in visited_after_leaving

    def test_exclude_origin_in_two_node_cluster_forces_at_neighbor(self, make_request):
        params = SimParams(max_forwards=5, seed=0, exclude_origin=True)
        nodes, cluster = self._cluster(
            {"A": saturated_queue(), "B": saturated_queue()}, params
        )
        request = make_request(20, 4000)
        terminal = dispatch(request, nodes["A"], cluster, random.Random(0))
        assert terminal == "B"
        assert request.forward_count == 1


class TestRunReplication:
    def test_single_unloaded_node_meets_deadline(self):
        scenario = tiny_scenario({"A": 1}, nodes=("A",))
        result = run_replication(scenario, SimParams(seed=0), 0)
        assert result.requests == 1
        assert result.met == 1
        assert result.forwards == 0

    def test_scenario1_totals_and_forward_bound(self):
        scenario = builtin_scenario(1)
        params = SimParams(queue_policy="preferential", seed=7)
        result = run_replication(scenario, params, derive_seed(7, 0))
        assert result.requests == 6000
        assert result.met + result.missed == 6000
        assert result.forwards <= 12_000

    def test_hop_bound_respected(self):
        scenario = builtin_scenario(1)
        params = SimParams(queue_policy="fifo", seed=3, max_forwards=1)
        result = run_replication(scenario, params, 3)
        assert result.forwards <= 1 * 6000

    def test_identical_seeds_identical_results(self):
        scenario = builtin_scenario(2)
        params = SimParams(queue_policy="preferential", seed=11)
        a = run_replication(scenario, params, 42)
        b = run_replication(scenario, params, 42)
        assert a == b

    def test_policies_consume_identical_streams(self):
        scenario = builtin_scenario(1)
        streams = [
            generate_requests(scenario, params, random.Random(123))
            for params in (
                SimParams(queue_policy="fifo", seed=5),
                SimParams(queue_policy="preferential", seed=5),
            )
        ]
        keys = [
            [(r.id, r.origin_node, r.service_id, r.arrival_time) for r in stream]
            for stream in streams
        ]
        assert keys[0] == keys[1]

    def test_per_node_breakdown_sums_to_totals(self):
        scenario = builtin_scenario(2)
        result = run_replication(scenario, SimParams(queue_policy="fifo", seed=1), 1)
        assert sum(n.met for n in result.per_node.values()) == result.met
        assert sum(n.missed for n in result.per_node.values()) == result.missed
        assert sum(n.forwards_out for n in result.per_node.values()) == result.forwards

    def test_uniform_arrivals_complete_consistently(self):
        scenario = builtin_scenario(1)
        params = SimParams(
            queue_policy="preferential",
            seed=2,
            arrival_model="uniform_horizon",
            horizon=50_000,
        )
        result = run_replication(scenario, params, 2)
        assert result.met + result.missed == result.requests


class TestRunMany:
    def test_results_ordered_by_replication_index(self):
        scenario = tiny_scenario({"A": 3, "B": 2})
        params = SimParams(seed=9)
        results = run_many(scenario, params, 4)
        assert [r.seed for r in results] == [derive_seed(9, i) for i in range(4)]

    def test_worker_pool_matches_sequential(self):
        scenario = builtin_scenario(1)
        params = SimParams(queue_policy="fifo", seed=4)
        sequential = run_many(scenario, params, 3)
        pooled = run_many(scenario, params, 3, workers=2)
        assert sequential == pooled

    def test_trace_files_written_and_admits_always_met(self, tmp_path):
        scenario = builtin_scenario(1)
        params = SimParams(queue_policy="preferential", seed=6)
        run_many(scenario, params, 1, trace_dir=str(tmp_path))
        trace = (tmp_path / "trace_rep000.txt").read_text().splitlines()
        assert trace
        admitted = set()
        completed = {}
        for line in trace:
            time, node, rid, action = line.split(" ", 3)
            if action == "admit":
                admitted.add(int(rid))
            elif action == "complete":
                completed[int(rid)] = float(time)
        stream = generate_requests(scenario, params, random.Random(derive_seed(6, 0)))
        deadlines = {r.id: r.deadline_end for r in stream}
        assert admitted
        assert set(deadlines) == set(completed)
        for rid in admitted:
            assert completed[rid] <= deadlines[rid]


def test_advance_error_surfaces_for_backwards_time():
    queue = FifoQueue()
    queue.advance(10)
    with pytest.raises(ValueError):
        queue.advance(9)
