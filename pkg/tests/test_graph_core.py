"""Work-graph model: validation rules, role and coordination subgraphs."""

import random

import pytest

from jsat.io import bundled_collab_nav_model
from jsat.model import (
    Agent,
    CurrencyEdge,
    FunctionNode,
    JsatModel,
    ResourceNode,
    RoleAssignment,
    coordination_subgraph,
    role_subgraph,
    validate,
)


def tiny_model(**overrides):
    fields = dict(
        resources=[ResourceNode("r1", "resource one"), ResourceNode("r2", "resource two")],
        functions=[FunctionNode("f1", "function one"), FunctionNode("f2", "function two")],
        edges=[CurrencyEdge("r1", "f1"), CurrencyEdge("f1", "r2"), CurrencyEdge("r2", "f2")],
        agents=[Agent("human", "Operator", "human"), Agent("robot", "Rover", "robot")],
        roles=[
            RoleAssignment("f1", "robot", competency=True, authority=True),
            RoleAssignment("f2", "human", competency=True, authority=True),
        ],
        default_producer={"r2": "f1"},
    )
    fields.update(overrides)
    return JsatModel.build(**fields)


class TestValidate:
    def test_bundled_model_is_valid(self):
        assert validate(bundled_collab_nav_model()) == []

    def test_tiny_model_is_valid(self):
        assert validate(tiny_model()) == []

    def test_resource_to_resource_edge_is_exactly_one_bipartiteness_violation(self):
        model = tiny_model(
            edges=[CurrencyEdge("r1", "f1"), CurrencyEdge("r1", "r2")],
            default_producer={},
        )
        violations = validate(model)
        assert len(violations) == 1
        assert violations[0].rule == "bipartiteness"
        assert violations[0].subject == "r1->r2"

    def test_function_to_function_edge_is_non_bipartite(self):
        model = tiny_model(edges=[CurrencyEdge("f1", "f2")], default_producer={})
        assert [v.rule for v in validate(model)] == ["bipartiteness"]

    def test_finite_currency_consumer_without_producer(self):
        model = tiny_model(
            edges=[CurrencyEdge("r2", "f2", required_currency_s=20.0)],
            default_producer={},
        )
        violations = validate(model)
        assert len(violations) == 1
        assert violations[0].rule == "missing-producer"
        assert violations[0].subject == "r2"

    def test_duplicate_node_id(self):
        model = tiny_model(
            resources=[ResourceNode("r1", "a"), ResourceNode("r1", "b"), ResourceNode("r2", "c")]
        )
        assert "duplicate-id" in {v.rule for v in validate(model)}

    def test_bad_id_format(self):
        model = tiny_model(resources=[ResourceNode("1bad", "x"), ResourceNode("r1", "a"), ResourceNode("r2", "b")])
        assert "id-format" in {v.rule for v in validate(model)}

    def test_unknown_edge_endpoint(self):
        model = tiny_model(edges=[CurrencyEdge("nope", "f1")], default_producer={})
        assert "unknown-endpoint" in {v.rule for v in validate(model)}

    def test_currency_on_output_edge(self):
        model = tiny_model(edges=[CurrencyEdge("f1", "r2", required_currency_s=5.0)], default_producer={})
        assert "currency-on-output" in {v.rule for v in validate(model)}

    def test_negative_currency(self):
        model = tiny_model(
            edges=[CurrencyEdge("r1", "f1", required_currency_s=-1.0)],
            default_producer={"r1": "f1"},
        )
        rules = {v.rule for v in validate(model)}
        assert "negative-currency" in rules

    def test_invalid_producer_without_edge(self):
        model = tiny_model(default_producer={"r1": "f2"})
        assert "invalid-producer" in {v.rule for v in validate(model)}

    def test_authority_requires_competency(self):
        model = tiny_model(
            roles=[RoleAssignment("f1", "robot", competency=False, authority=True)]
        )
        assert "authority-without-competency" in {v.rule for v in validate(model)}

    def test_duplicate_edge_and_role(self):
        model = tiny_model(
            edges=[CurrencyEdge("r1", "f1"), CurrencyEdge("r1", "f1")],
            roles=[
                RoleAssignment("f1", "robot", competency=True, authority=True),
                RoleAssignment("f1", "robot", competency=True),
            ],
            default_producer={},
        )
        rules = [v.rule for v in validate(model)]
        assert "duplicate-edge" in rules and "duplicate-role" in rules

    def test_bad_layer_and_kind(self):
        model = tiny_model(
            resources=[ResourceNode("r1", "a", layer="elsewhere"), ResourceNode("r2", "b")],
            agents=[Agent("human", "Operator", "alien"), Agent("robot", "Rover", "robot")],
        )
        rules = {v.rule for v in validate(model)}
        assert "bad-layer" in rules and "bad-kind" in rules

    def test_order_independent_and_idempotent(self):
        model = bundled_collab_nav_model()
        rng = random.Random(7)
        for _ in range(5):
            resources = list(model.resources)
            functions = list(model.functions)
            edges = list(model.edges)
            rng.shuffle(resources)
            rng.shuffle(functions)
            rng.shuffle(edges)
            shuffled = JsatModel(
                resources=tuple(resources),
                functions=tuple(functions),
                edges=tuple(edges),
                agents=model.agents,
                roles=model.roles,
                default_producer=model.default_producer,
            )
            assert validate(shuffled) == validate(model) == validate(model)


class TestRoleSubgraph:
    def test_robot_authority_functions(self):
        model = bundled_collab_nav_model()
        sub = role_subgraph(model, "robot", "authority")
        assert {f.id for f in sub.functions} == {"IC", "RM", "NWS", "BLM", "TMP", "RPP", "OLL", "LAA"}

    def test_human_authority_functions(self):
        model = bundled_collab_nav_model()
        sub = role_subgraph(model, "human", "authority")
        assert {f.id for f in sub.functions} == {"CAM", "RPP", "OLL", "LAA", "Mon-RA", "Proj-RA", "Dir-RA"}

    def test_subgraph_is_subset(self):
        model = bundled_collab_nav_model()
        for agent in ("human", "robot"):
            for dimension in ("competency", "authority", "responsibility"):
                sub = role_subgraph(model, agent, dimension)
                assert {f.id for f in sub.functions} <= {f.id for f in model.functions}
                assert {r.id for r in sub.resources} <= {r.id for r in model.resources}
                assert set(sub.edges) <= set(model.edges)

    def test_resources_are_adjacent_to_kept_functions(self):
        model = bundled_collab_nav_model()
        sub = role_subgraph(model, "human", "authority")
        kept_fns = {f.id for f in sub.functions}
        for r in sub.resources:
            touching = {e.src for e in model.edges if e.dst == r.id} | {
                e.dst for e in model.edges if e.src == r.id
            }
            assert touching & kept_fns

    def test_authority_union_covers_all_held_functions(self):
        model = bundled_collab_nav_model()
        union = set()
        for agent in model.agents:
            union |= {f.id for f in role_subgraph(model, agent.id, "authority").functions}
        held = {f.id for f in model.functions if model.holders(f.id)}
        assert union == held

    def test_agent_with_no_flags_yields_empty_subgraph(self):
        model = tiny_model(
            roles=[RoleAssignment("f1", "robot", competency=True, authority=True)]
        )
        sub = role_subgraph(model, "human", "authority")
        assert sub.functions == () and sub.resources == () and sub.edges == ()

    def test_unknown_agent_raises(self):
        with pytest.raises(ValueError, match="unknown agent"):
            role_subgraph(tiny_model(), "nobody", "authority")

    def test_unknown_dimension_raises(self):
        with pytest.raises(ValueError, match="dimension"):
            role_subgraph(tiny_model(), "human", "enthusiasm")


class TestCoordinationSubgraph:
    def test_bundled_membership(self):
        model = bundled_collab_nav_model()
        coordination = coordination_subgraph(model)
        assert {f.id for f in coordination.graph.functions} == {"Mon-RA", "Proj-RA", "Dir-RA"}
        assert {r.id for r in coordination.graph.resources} == {"RAS", "DRA", "ARA", "PRA"}

    def test_boundary_includes_robot_functions_to_status(self):
        model = bundled_collab_nav_model()
        boundary = coordination_subgraph(model).boundary_edges
        keys = {e.key for e in boundary}
        for fn in ("IC", "RM", "NWS", "BLM", "TMP"):
            assert f"{fn}->RAS" in keys

    def test_internal_edges_stay_inside_layers(self):
        model = bundled_collab_nav_model()
        coordination = coordination_subgraph(model)
        ids = {n.id for n in coordination.graph.resources} | {n.id for n in coordination.graph.functions}
        for e in coordination.graph.edges:
            assert e.src in ids and e.dst in ids
        for e in coordination.boundary_edges:
            assert (e.src in ids) != (e.dst in ids)

    def test_model_without_coordination_layers_is_empty(self):
        coordination = coordination_subgraph(tiny_model())
        assert coordination.graph.functions == ()
        assert coordination.graph.resources == ()
        assert coordination.boundary_edges == ()


class TestModelStructure:
    def test_bipartiteness_holds_for_every_bundled_edge(self):
        model = bundled_collab_nav_model()
        for e in model.edges:
            src_is_resource = e.src in model.resources_by_id
            dst_is_resource = e.dst in model.resources_by_id
            assert src_is_resource != dst_is_resource

    def test_read_write_pairs_are_flagged(self):
        model = bundled_collab_nav_model()
        assert ("OLL", "OL") in model.read_write_pairs

    def test_joint_authority_functions(self):
        model = bundled_collab_nav_model()
        assert model.joint_authority_functions == ("LAA", "OLL", "RPP")
