"""Topology analyses against independent definitional oracles."""

import itertools
import math
import random

import numpy as np
import pytest

from jsat.io import bundled_collab_nav_model
from jsat.model import Agent, CurrencyEdge, FunctionNode, JsatModel, ResourceNode, RoleAssignment
from jsat.topology import (
    Partition,
    attach_resources,
    best_bipartition,
    centrality,
    combined_resource_rank,
    modularity,
    role_modularity_scan,
    role_partition,
)


def brute_force_modularity(model: JsatModel, partition: Partition) -> float:
    """Definitional O(n^2) sum over every ordered node pair (diagonal included)."""
    nodes = list(model.node_ids)
    m = len(model.edges)
    adjacency = {(e.src, e.dst): 1.0 for e in model.edges}
    k_out = {n: sum(1 for e in model.edges if e.src == n) for n in nodes}
    k_in = {n: sum(1 for e in model.edges if e.dst == n) for n in nodes}
    labels = partition.assignment
    total = 0.0
    for i in nodes:
        for j in nodes:
            if labels[i] != labels[j]:
                continue
            total += adjacency.get((i, j), 0.0) - k_out[i] * k_in[j] / m
    return total / m


def random_bipartite_model(rng: random.Random, max_nodes: int = 10) -> JsatModel:
    n_fns = rng.randint(1, max_nodes // 2)
    n_res = rng.randint(1, max_nodes - n_fns)
    functions = [FunctionNode(f"f{i}", f"fn {i}") for i in range(n_fns)]
    resources = [ResourceNode(f"r{i}", f"res {i}") for i in range(n_res)]
    edges = []
    for f in functions:
        for r in resources:
            if rng.random() < 0.4:
                edges.append(CurrencyEdge(r.id, f.id))
            if rng.random() < 0.4:
                edges.append(CurrencyEdge(f.id, r.id))
    if not edges:
        edges.append(CurrencyEdge(resources[0].id, functions[0].id))
    return JsatModel.build(resources=resources, functions=functions, edges=edges)


def random_partition(rng: random.Random, model: JsatModel, n_communities: int = 2) -> Partition:
    return Partition({n: str(rng.randrange(n_communities)) for n in model.node_ids})


def exhaustive_best_bipartition(model: JsatModel) -> float:
    """Oracle: max definitional Q over all function assignments + attachment."""
    fn_ids = [f.id for f in model.functions]
    best = -math.inf
    for bits in itertools.product("01", repeat=len(fn_ids)):
        labels = attach_resources(model, dict(zip(fn_ids, bits)))
        best = max(best, brute_force_modularity(model, Partition(labels)))
    return best


class TestModularity:
    def test_single_community_is_exactly_zero_on_random_graphs(self):
        for seed in range(100):
            model = random_bipartite_model(random.Random(seed))
            q = modularity(model, Partition({n: "all" for n in model.node_ids}))
            assert abs(q) < 1e-12

    def test_matches_brute_force_on_random_graphs(self):
        for seed in range(100):
            rng = random.Random(1000 + seed)
            model = random_bipartite_model(rng)
            partition = random_partition(rng, model, n_communities=rng.randint(1, 3))
            assert modularity(model, partition) == pytest.approx(
                brute_force_modularity(model, partition), abs=1e-12
            )

    def test_four_node_cycle_value_from_oracle(self):
        model = JsatModel.build(
            resources=[ResourceNode("r1", "r1"), ResourceNode("r2", "r2")],
            functions=[FunctionNode("f1", "f1"), FunctionNode("f2", "f2")],
            edges=[
                CurrencyEdge("f1", "r1"),
                CurrencyEdge("r1", "f2"),
                CurrencyEdge("f2", "r2"),
                CurrencyEdge("r2", "f1"),
            ],
        )
        partition = Partition({"f1": "a", "r1": "a", "f2": "b", "r2": "b"})
        expected = brute_force_modularity(model, partition)  # 16-term definitional sum
        assert expected == pytest.approx(0.0, abs=1e-12)
        assert modularity(model, partition) == pytest.approx(expected, abs=1e-12)

    def test_label_permutation_invariance(self):
        model = bundled_collab_nav_model()
        partition = role_partition(model, {"RPP": "robot", "OLL": "human", "LAA": "human"})
        q = modularity(model, partition)
        swapped = Partition({n: ("X" if c == "human" else "Y") for n, c in partition.assignment.items()})
        assert modularity(model, swapped) == pytest.approx(q, abs=1e-15)

    def test_partial_partition_rejected(self):
        model = random_bipartite_model(random.Random(0))
        with pytest.raises(ValueError, match="cover"):
            modularity(model, Partition({model.node_ids[0]: "a"}))

    def test_empty_edge_set_rejected(self):
        model = JsatModel.build(
            resources=[ResourceNode("r1", "x")], functions=[FunctionNode("f1", "y")]
        )
        with pytest.raises(ValueError, match="edge"):
            modularity(model, Partition({"r1": "a", "f1": "a"}))


class TestBestBipartition:
    def test_two_disjoint_cycles_split_at_half(self):
        model = JsatModel.build(
            resources=[ResourceNode("r1", "r1"), ResourceNode("r2", "r2")],
            functions=[FunctionNode("f1", "f1"), FunctionNode("f2", "f2")],
            edges=[
                CurrencyEdge("f1", "r1"),
                CurrencyEdge("r1", "f1"),
                CurrencyEdge("f2", "r2"),
                CurrencyEdge("r2", "f2"),
            ],
            default_producer={"r1": "f1", "r2": "f2"},
        )
        partition, q = best_bipartition(model)
        assert q == pytest.approx(0.5, abs=1e-12)
        assert partition.label("f1") == partition.label("r1")
        assert partition.label("f2") == partition.label("r2")
        assert partition.label("f1") != partition.label("f2")
        assert q == pytest.approx(exhaustive_best_bipartition(model), abs=1e-12)

    def test_symmetric_cycle_ties_break_to_one_community(self):
        model = JsatModel.build(
            resources=[ResourceNode("r1", "r1"), ResourceNode("r2", "r2")],
            functions=[FunctionNode("f1", "f1"), FunctionNode("f2", "f2")],
            edges=[
                CurrencyEdge("f1", "r1"),
                CurrencyEdge("r1", "f2"),
                CurrencyEdge("f2", "r2"),
                CurrencyEdge("r2", "f1"),
            ],
            default_producer={"r1": "f1", "r2": "f2"},
        )
        partition, q = best_bipartition(model)
        assert q == pytest.approx(0.0, abs=1e-12)
        # every split scores zero; the lexicographically smallest assignment wins
        assert set(partition.assignment.values()) == {"0"}

    def test_matches_exhaustive_oracle_on_random_graphs(self):
        for seed in range(50):
            rng = random.Random(2000 + seed)
            model = random_bipartite_model(rng, max_nodes=12)
            _, q = best_bipartition(model)
            assert q == pytest.approx(exhaustive_best_bipartition(model), abs=1e-12)

    def test_bundled_model_separates_perception_from_drive(self):
        model = bundled_collab_nav_model()
        partition, q = best_bipartition(model)
        perception = {"IC", "OLL", "LAA", "CAM"}
        drive = {"RM", "NWS", "BLM", "TMP", "RPP"}
        labels = {partition.label(f) for f in perception}
        assert len(labels) == 1
        assert labels != {partition.label(f) for f in drive}
        assert len({partition.label(f) for f in drive}) == 1
        assert q > 0

    def test_exact_mode_guard(self):
        functions = [FunctionNode(f"f{i}", "x") for i in range(20)]
        resources = [ResourceNode(f"r{i}", "y") for i in range(20)]
        edges = [CurrencyEdge(f"r{i}", f"f{i}") for i in range(20)]
        model = JsatModel.build(resources=resources, functions=functions, edges=edges)
        with pytest.raises(ValueError, match="exact"):
            best_bipartition(model)
        partition, q = best_bipartition(model, mode="greedy")
        assert set(partition.assignment) == set(model.node_ids)


class TestRolePartition:
    def test_functions_follow_their_holder(self):
        model = bundled_collab_nav_model()
        partition = role_partition(model, {"RPP": "human", "OLL": "robot", "LAA": "robot"})
        assert partition.label("RPP") == "human"
        assert partition.label("CAM") == "human"
        assert partition.label("RM") == "robot"

    def test_resources_follow_default_producer(self):
        model = bundled_collab_nav_model()
        partition = role_partition(model, {"RPP": "human", "OLL": "robot", "LAA": "robot"})
        assert partition.label("PP") == "human"  # produced by RPP
        assert partition.label("OL") == "robot"  # produced by OLL
        assert partition.label("CA") == "human"  # produced by CAM

    def test_missing_override_rejected(self):
        model = bundled_collab_nav_model()
        with pytest.raises(ValueError, match="override"):
            role_partition(model, {"RPP": "human"})

    def test_override_must_name_joint_function(self):
        model = bundled_collab_nav_model()
        with pytest.raises(ValueError, match="non-joint"):
            role_partition(model, {"RM": "human", "RPP": "human", "OLL": "human", "LAA": "human"})

    def test_override_must_name_actual_holder(self):
        model = bundled_collab_nav_model()
        bad = {"RPP": "nobody", "OLL": "robot", "LAA": "robot"}
        with pytest.raises(ValueError, match="authority"):
            role_partition(model, bad)

    def test_partition_is_total(self):
        model = bundled_collab_nav_model()
        partition = role_partition(model, {"RPP": "robot", "OLL": "robot", "LAA": "robot"})
        assert set(partition.assignment) == set(model.node_ids)


class TestRoleModularityScan:
    def test_bundled_scan_has_eight_rows(self):
        scan = role_modularity_scan(bundled_collab_nav_model())
        assert len(scan.rows) == 8
        assert scan.joint_functions == ("LAA", "OLL", "RPP")

    def test_argmax_and_argmin_bound_all_rows(self):
        scan = role_modularity_scan(bundled_collab_nav_model())
        for row in scan.rows:
            assert scan.argmax.q >= row.q
            assert scan.argmin.q <= row.q

    def test_bundled_argmax_argmin_assignments(self):
        scan = role_modularity_scan(bundled_collab_nav_model())
        assert set(scan.argmax.human_functions) in ({"LAA", "OLL"}, {"LAA", "OLL", "RPP"})
        assert set(scan.argmin.human_functions) == {"RPP"}

    def test_no_joint_functions_yields_identity_row(self):
        model = JsatModel.build(
            resources=[ResourceNode("r1", "x")],
            functions=[FunctionNode("f1", "y")],
            edges=[CurrencyEdge("r1", "f1"), CurrencyEdge("f1", "r1")],
            agents=[Agent("human", "H", "human"), Agent("robot", "R", "robot")],
            roles=[RoleAssignment("f1", "robot", competency=True, authority=True)],
            default_producer={"r1": "f1"},
        )
        scan = role_modularity_scan(model)
        assert len(scan.rows) == 1
        assert scan.rows[0].bitmask == 0
        assert scan.rows[0].override == {}

    def test_bitmask_encodes_sorted_joint_functions(self):
        scan = role_modularity_scan(bundled_collab_nav_model())
        by_mask = {row.bitmask: row.human_functions for row in scan.rows}
        assert by_mask[0b001] == ("LAA",)
        assert by_mask[0b011] == ("LAA", "OLL")
        assert by_mask[0b100] == ("RPP",)


class TestCentrality:
    def test_directed_cycle_scores_are_uniform(self):
        model = JsatModel.build(
            resources=[ResourceNode("r1", "r1"), ResourceNode("r2", "r2")],
            functions=[FunctionNode("f1", "f1"), FunctionNode("f2", "f2")],
            edges=[
                CurrencyEdge("f1", "r1"),
                CurrencyEdge("r1", "f2"),
                CurrencyEdge("f2", "r2"),
                CurrencyEdge("r2", "f1"),
            ],
        )
        report = centrality(model)
        for node in report.nodes:
            assert node.eig_in == pytest.approx(0.5, abs=1e-9)
            assert node.eig_out == pytest.approx(0.5, abs=1e-9)

    def test_star_against_dense_eigensolver(self):
        model = JsatModel.build(
            resources=[ResourceNode(f"r{i}", "x") for i in (1, 2, 3)],
            functions=[FunctionNode("f1", "hub")],
            edges=[CurrencyEdge(f"r{i}", "f1") for i in (1, 2, 3)],
        )
        report = centrality(model)
        by_id = report.by_id()
        assert by_id["f1"].eig_in > max(by_id[f"r{i}"].eig_in for i in (1, 2, 3))
        assert by_id["r1"].eig_out == pytest.approx(by_id["r2"].eig_out, abs=1e-9)
        assert by_id["r2"].eig_out == pytest.approx(by_id["r3"].eig_out, abs=1e-9)
        # oracle: dominant eigenvector of the regularized matrix, dense solver
        ids = list(model.node_ids)
        n = len(ids)
        a = np.zeros((n, n))
        for e in model.edges:
            a[ids.index(e.src), ids.index(e.dst)] = 1.0
        m = a.T + 1e-3 / n
        vals, vecs = np.linalg.eig(m)
        lead = np.abs(vecs[:, np.argmax(vals.real)].real)
        lead /= np.linalg.norm(lead)
        for i, node_id in enumerate(ids):
            assert by_id[node_id].eig_in == pytest.approx(lead[i], abs=1e-6)

    def test_unit_norm_and_residual_bound(self):
        model = bundled_collab_nav_model()
        report = centrality(model)
        assert np.linalg.norm([n.eig_in for n in report.nodes]) == pytest.approx(1.0, abs=1e-9)
        assert np.linalg.norm([n.eig_out for n in report.nodes]) == pytest.approx(1.0, abs=1e-9)
        if report.iterations_in < 10_000:
            assert report.residual_in < 1e-8
        if report.iterations_out < 10_000:
            assert report.residual_out < 1e-8

    def test_small_graph_converges_with_tight_residual(self):
        model = JsatModel.build(
            resources=[ResourceNode(f"r{i}", "x") for i in (1, 2, 3)],
            functions=[FunctionNode("f1", "hub")],
            edges=[CurrencyEdge(f"r{i}", "f1") for i in (1, 2, 3)],
        )
        report = centrality(model)
        assert report.iterations_in < 10_000 and report.residual_in < 1e-8
        assert report.iterations_out < 10_000 and report.residual_out < 1e-8

    def test_nonnegative_scores(self):
        report = centrality(bundled_collab_nav_model())
        assert all(n.eig_in >= 0 and n.eig_out >= 0 for n in report.nodes)

    def test_degrees_match_edge_counts(self):
        model = bundled_collab_nav_model()
        report = centrality(model)
        for node in report.nodes:
            assert node.in_degree == len(model.edges_in[node.node_id])
            assert node.out_degree == len(model.edges_out[node.node_id])

    def test_id_permutation_permutes_scores(self):
        rng = random.Random(5)
        model = random_bipartite_model(rng, max_nodes=8)
        report = centrality(model)
        renamed = {n: f"z{idx}_{n}" for idx, n in enumerate(model.node_ids)}
        permuted = JsatModel.build(
            resources=[ResourceNode(renamed[r.id], r.name) for r in model.resources],
            functions=[FunctionNode(renamed[f.id], f.name) for f in model.functions],
            edges=[CurrencyEdge(renamed[e.src], renamed[e.dst]) for e in model.edges],
        )
        permuted_report = centrality(permuted)
        original = report.by_id()
        for node in permuted_report.nodes:
            source = next(k for k, v in renamed.items() if v == node.node_id)
            assert node.eig_in == pytest.approx(original[source].eig_in, abs=1e-6)
            assert node.eig_out == pytest.approx(original[source].eig_out, abs=1e-6)

    def test_bundled_rankings(self):
        report = centrality(bundled_collab_nav_model())
        top_in = set(report.top("eig_in", kind="function", n=3))
        top_out = set(report.top("eig_out", kind="function", n=3))
        assert {"RM", "NWS"} <= top_in
        assert {"RM", "NWS"} <= top_out
        assert "RPP" in top_in
        assert {"RS", "NWP", "PP"} <= set(combined_resource_rank(report)[:5])
