import random

import pytest

from mecsim.simulation import SimParams
from mecsim.workload import (
    ScenarioConfig,
    ScenarioError,
    ServiceSpec,
    builtin_scenario,
    generate_requests,
    parse_scenario_file,
    write_scenario_file,
)


class TestBuiltinScenarios:
    def test_totals(self):
        assert builtin_scenario(1).total_requests() == 6000
        assert builtin_scenario(2).total_requests() == 8000
        assert builtin_scenario(3).total_requests() == 9800

    def test_scenario1_per_node_totals(self):
        scenario = builtin_scenario(1)
        assert [scenario.node_total(n) for n in scenario.nodes] == [2000, 2000, 2000]

    def test_scenario2_per_node_totals(self):
        scenario = builtin_scenario(2)
        assert {n: scenario.node_total(n) for n in scenario.nodes} == {
            "M1": 2500,
            "M2": 2800,
            "M3": 2700,
        }

    def test_scenario3_has_six_nodes_with_light_tail(self):
        scenario = builtin_scenario(3)
        assert scenario.nodes == ["M1", "M2", "M3", "M4", "M5", "M6"]
        for node in ("M4", "M5", "M6"):
            assert scenario.node_total(node) == 600

    def test_service_catalog(self):
        services = {s.id: s for s in builtin_scenario(1).services}
        assert services["S1"].process_time == 180
        assert services["S1"].deadline == 9000
        assert services["S5"].process_time == 44
        assert services["S6"].deadline == 4000
        assert services["S4"].pixel_count == 8294400
        assert services["S2"].environment == "busy"

    def test_unknown_number_rejected(self):
        with pytest.raises(ScenarioError):
            builtin_scenario(9)

    def test_calls_return_fresh_objects(self):
        a = builtin_scenario(1)
        a.counts["M1"]["S1"] = 0
        assert builtin_scenario(1).counts["M1"]["S1"] == 500


class TestGenerateRequests:
    def test_scenario1_stream_composition(self):
        scenario = builtin_scenario(1)
        stream = generate_requests(scenario, SimParams(seed=1), random.Random(1))
        assert len(stream) == 6000
        s1 = [r for r in stream if r.service_id == "S1"]
        assert len(s1) == 1000  # 500 + 200 + 300
        assert sorted({r.origin_node for r in stream}) == ["M1", "M2", "M3"]
        assert sorted(r.id for r in stream) == list(range(6000))

    def test_multiset_matches_counts_matrix(self):
        rng = random.Random(9)
        for _ in range(10):
            nodes = [f"N{i}" for i in range(rng.randint(1, 4))]
            services = [
                ServiceSpec(f"X{i}", rng.randint(1, 50), rng.randint(10, 100))
                for i in range(rng.randint(1, 4))
            ]
            counts = {
                n: {s.id: rng.randint(0, 20) for s in services} for n in nodes
            }
            scenario = ScenarioConfig("random", services, nodes, counts)
            stream = generate_requests(scenario, SimParams(seed=0), random.Random(5))
            seen: dict = {}
            for r in stream:
                key = (r.origin_node, r.service_id)
                seen[key] = seen.get(key, 0) + 1
            for n in nodes:
                for s in services:
                    assert seen.get((n, s.id), 0) == counts[n][s.id]

    def test_batch_is_a_seeded_permutation_at_time_zero(self):
        scenario = builtin_scenario(1)
        a = generate_requests(scenario, SimParams(seed=0), random.Random(42))
        b = generate_requests(scenario, SimParams(seed=0), random.Random(43))
        assert all(r.arrival_time == 0 for r in a)
        key = lambda r: (r.origin_node, r.service_id)
        assert [key(r) for r in a] != [key(r) for r in b]
        assert sorted(map(key, a)) == sorted(map(key, b))

    def test_uniform_arrivals_sorted_and_deterministic(self):
        scenario = builtin_scenario(2)
        params = SimParams(seed=0, arrival_model="uniform_horizon", horizon=10_000)
        a = generate_requests(scenario, params, random.Random(7))
        b = generate_requests(scenario, params, random.Random(7))
        times = [r.arrival_time for r in a]
        assert times == sorted(times)
        assert 0 <= min(times) and max(times) <= 10_000
        assert [(r.origin_node, r.service_id, r.arrival_time) for r in a] == [
            (r.origin_node, r.service_id, r.arrival_time) for r in b
        ]

    def test_deadline_is_arrival_plus_service_deadline(self):
        scenario = builtin_scenario(1)
        params = SimParams(seed=0, arrival_model="uniform_horizon", horizon=5_000)
        services = {s.id: s for s in scenario.services}
        for r in generate_requests(scenario, params, random.Random(3)):
            assert r.deadline_end == r.arrival_time + services[r.service_id].deadline
            assert r.process_time == services[r.service_id].process_time


class TestScenarioFiles:
    def test_round_trip(self, tmp_path):
        scenario = builtin_scenario(2)
        path = tmp_path / "scenario.json"
        write_scenario_file(scenario, path)
        assert parse_scenario_file(path) == scenario

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "s.json"
        write_scenario_file(builtin_scenario(1), path)
        text = path.read_text().replace('"name"', '"nonsense": 1, "name"', 1)
        path.write_text(text)
        with pytest.raises(ScenarioError, match="unknown keys"):
            parse_scenario_file(path)

    def test_undeclared_service_rejected(self, tmp_path):
        scenario = builtin_scenario(1)
        scenario.counts["M1"]["S9"] = 5
        with pytest.raises(ScenarioError, match="undeclared service"):
            write_scenario_file(scenario, tmp_path / "s.json")

    def test_negative_count_rejected(self, tmp_path):
        path = tmp_path / "s.json"
        write_scenario_file(builtin_scenario(1), path)
        text = path.read_text().replace('"S1": 500', '"S1": -500', 1)
        path.write_text(text)
        with pytest.raises(ScenarioError, match="negative"):
            parse_scenario_file(path)

    def test_syntax_error_reports_position(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"schema_version": 1,,}')
        with pytest.raises(ScenarioError, match="line 1"):
            parse_scenario_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError, match="cannot read"):
            parse_scenario_file(tmp_path / "missing.json")
