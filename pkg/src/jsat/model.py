"""Layered directed bipartite work-graph model.

A work graph couples *function* nodes (means of acting on the environment)
with *resource* nodes (the physical and informational states that functions
consume and produce). Every edge connects a resource to a function (an input,
optionally carrying a required information currency in seconds) or a function
to a resource (an output). Agents are ascribed competency, authority, and
responsibility over functions; authority determines who executes a function
in simulation.

Nodes live on four layers: taskwork resources and distributed-work functions
form the primary graph; coordination-grounding resources and synchrony
functions form the coordination graph. Both share the same edge semantics.

Models are frozen after construction: analyses and simulation treat them as
immutable snapshots.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

RESOURCE_LAYERS = ("taskwork-resource", "coordination-grounding")
FUNCTION_LAYERS = ("distributed-work", "synchrony")
AGENT_KINDS = ("human", "robot")
ROLE_DIMENSIONS = ("competency", "authority", "responsibility")

#: Required currency value meaning "never forces a refresh".
INFINITE = math.inf

_ID_PATTERN = re.compile(r"[A-Za-z][A-Za-z0-9_-]*\Z")


@dataclass(frozen=True, slots=True)
class ResourceNode:
    """A tangible or intangible environmental state used or produced by functions."""

    id: str
    name: str
    layer: str = "taskwork-resource"
    shared: bool = False


@dataclass(frozen=True, slots=True)
class FunctionNode:
    """A means of action that transforms states of the work environment."""

    id: str
    name: str
    layer: str = "distributed-work"
    behavior: str = "not-modeled"


@dataclass(frozen=True, slots=True)
class CurrencyEdge:
    """A directed means-end dependency between a resource and a function.

    Direction encodes the role: resource -> function is an input (the resource
    is a means for the function), function -> resource is an output. The
    required currency is the maximum acceptable age, in seconds, of the
    consumed resource at execution time; it is only meaningful on input edges
    and defaults to infinity (never forces a refresh).
    """

    src: str
    dst: str
    required_currency_s: float = INFINITE
    provenance: str = ""

    @property
    def key(self) -> str:
        return f"{self.src}->{self.dst}"


@dataclass(frozen=True, slots=True)
class Agent:
    """A human or robotic actor that can hold roles over functions."""

    id: str
    name: str
    kind: str


@dataclass(frozen=True, slots=True)
class RoleAssignment:
    """One agent's role flags over one function."""

    function: str
    agent: str
    competency: bool = False
    authority: bool = False
    responsibility: bool = False


@dataclass(frozen=True)
class JsatModel:
    """A complete work-graph model: nodes, edges, agents, roles, producers.

    ``default_producer`` names, for each resource that can be refreshed, the
    function the simulator invokes when the resource is stale. Construction
    does not validate; run :func:`validate` to collect violations.
    """

    resources: tuple[ResourceNode, ...]
    functions: tuple[FunctionNode, ...]
    edges: tuple[CurrencyEdge, ...]
    agents: tuple[Agent, ...]
    roles: tuple[RoleAssignment, ...]
    default_producer: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        resources: Iterable[ResourceNode] = (),
        functions: Iterable[FunctionNode] = (),
        edges: Iterable[CurrencyEdge] = (),
        agents: Iterable[Agent] = (),
        roles: Iterable[RoleAssignment] = (),
        default_producer: Mapping[str, str] | None = None,
    ) -> JsatModel:
        """Construct a model with all collections sorted for determinism."""
        return cls(
            resources=tuple(sorted(resources, key=lambda r: r.id)),
            functions=tuple(sorted(functions, key=lambda f: f.id)),
            edges=tuple(sorted(edges, key=lambda e: (e.src, e.dst))),
            agents=tuple(sorted(agents, key=lambda a: a.id)),
            roles=tuple(sorted(roles, key=lambda r: (r.function, r.agent))),
            default_producer=dict(sorted((default_producer or {}).items())),
        )

    @cached_property
    def resources_by_id(self) -> dict[str, ResourceNode]:
        return {r.id: r for r in self.resources}

    @cached_property
    def functions_by_id(self) -> dict[str, FunctionNode]:
        return {f.id: f for f in self.functions}

    @cached_property
    def agents_by_id(self) -> dict[str, Agent]:
        return {a.id: a for a in self.agents}

    @cached_property
    def node_ids(self) -> tuple[str, ...]:
        """All node ids (functions and resources), sorted."""
        return tuple(sorted([r.id for r in self.resources] + [f.id for f in self.functions]))

    @cached_property
    def edges_out(self) -> dict[str, tuple[CurrencyEdge, ...]]:
        """Outgoing edges per node id, sorted by destination."""
        out: dict[str, list[CurrencyEdge]] = {n: [] for n in self.node_ids}
        for e in self.edges:
            if e.src in out:
                out[e.src].append(e)
        return {n: tuple(sorted(v, key=lambda e: e.dst)) for n, v in out.items()}

    @cached_property
    def edges_in(self) -> dict[str, tuple[CurrencyEdge, ...]]:
        """Incoming edges per node id, sorted by source."""
        inc: dict[str, list[CurrencyEdge]] = {n: [] for n in self.node_ids}
        for e in self.edges:
            if e.dst in inc:
                inc[e.dst].append(e)
        return {n: tuple(sorted(v, key=lambda e: e.src)) for n, v in inc.items()}

    def inputs_of(self, function_id: str) -> tuple[CurrencyEdge, ...]:
        """Resource -> function edges consumed by a function."""
        return tuple(e for e in self.edges_in.get(function_id, ()) if e.src in self.resources_by_id)

    def outputs_of(self, function_id: str) -> tuple[CurrencyEdge, ...]:
        """Function -> resource edges produced by a function."""
        return tuple(e for e in self.edges_out.get(function_id, ()) if e.dst in self.resources_by_id)

    def consumers_of(self, resource_id: str) -> tuple[str, ...]:
        """Functions that consume a resource, sorted."""
        return tuple(
            e.dst for e in self.edges_out.get(resource_id, ()) if e.dst in self.functions_by_id
        )

    def producers_of(self, resource_id: str) -> tuple[str, ...]:
        """Functions with an output edge to a resource, sorted."""
        return tuple(
            sorted(e.src for e in self.edges_in.get(resource_id, ()) if e.src in self.functions_by_id)
        )

    def holders(self, function_id: str, dimension: str = "authority") -> tuple[str, ...]:
        """Agents whose role flag on `dimension` is true for a function, sorted."""
        if dimension not in ROLE_DIMENSIONS:
            raise ValueError(f"unknown role dimension: {dimension!r}")
        return tuple(
            sorted(r.agent for r in self.roles if r.function == function_id and getattr(r, dimension))
        )

    @cached_property
    def joint_authority_functions(self) -> tuple[str, ...]:
        """Functions over which two or more agents hold authority, sorted."""
        return tuple(f.id for f in self.functions if len(self.holders(f.id)) >= 2)

    @cached_property
    def read_write_pairs(self) -> tuple[tuple[str, str], ...]:
        """(function, resource) pairs where a function both reads and writes a resource."""
        pairs = []
        for f in self.functions:
            reads = {e.src for e in self.inputs_of(f.id)}
            writes = {e.dst for e in self.outputs_of(f.id)}
            pairs.extend((f.id, r) for r in sorted(reads & writes))
        return tuple(pairs)


@dataclass(frozen=True, slots=True)
class Violation:
    """One invariant violation, identified by rule name and offending subject."""

    rule: str
    subject: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.subject}: {self.rule}" + (f" ({self.detail})" if self.detail else "")


def validate(model: JsatModel) -> list[Violation]:
    """Collect every structural invariant violation in a model.

    Violations are data, not failures: an empty list means the model is valid.
    The result is deterministic, sorted by (subject, rule, detail), and does
    not depend on construction order.
    """
    found: list[Violation] = []
    res_ids = {r.id for r in model.resources}
    fn_ids = {f.id for f in model.functions}
    agent_ids = {a.id for a in model.agents}

    seen: set[str] = set()
    for node_id in (
        [r.id for r in model.resources] + [f.id for f in model.functions] + [a.id for a in model.agents]
    ):
        if not _ID_PATTERN.match(node_id or ""):
            found.append(Violation("id-format", node_id or "<empty>", "must match [A-Za-z][A-Za-z0-9_-]*"))
        if node_id in seen:
            found.append(Violation("duplicate-id", node_id))
        seen.add(node_id)

    for r in model.resources:
        if r.layer not in RESOURCE_LAYERS:
            found.append(Violation("bad-layer", r.id, f"unknown resource layer {r.layer!r}"))
    for f in model.functions:
        if f.layer not in FUNCTION_LAYERS:
            found.append(Violation("bad-layer", f.id, f"unknown function layer {f.layer!r}"))
    for a in model.agents:
        if a.kind not in AGENT_KINDS:
            found.append(Violation("bad-kind", a.id, f"unknown agent kind {a.kind!r}"))

    seen_edges: set[tuple[str, str]] = set()
    for e in model.edges:
        subject = e.key
        if (e.src, e.dst) in seen_edges:
            found.append(Violation("duplicate-edge", subject))
        seen_edges.add((e.src, e.dst))

        src_known = e.src in res_ids or e.src in fn_ids
        dst_known = e.dst in res_ids or e.dst in fn_ids
        if not src_known:
            found.append(Violation("unknown-endpoint", subject, f"unknown node {e.src!r}"))
        if not dst_known:
            found.append(Violation("unknown-endpoint", subject, f"unknown node {e.dst!r}"))
        if not (src_known and dst_known):
            continue

        src_is_res = e.src in res_ids
        dst_is_res = e.dst in res_ids
        if src_is_res == dst_is_res:
            kind = "resource" if src_is_res else "function"
            found.append(Violation("bipartiteness", subject, f"both endpoints are {kind} nodes"))
            continue
        if not src_is_res and math.isfinite(e.required_currency_s):
            found.append(Violation("currency-on-output", subject, "output edges carry no currency requirement"))
        if math.isnan(e.required_currency_s) or e.required_currency_s < 0:
            found.append(Violation("negative-currency", subject))

    for resource_id, function_id in model.default_producer.items():
        if resource_id not in res_ids or function_id not in fn_ids:
            found.append(Violation("invalid-producer", resource_id, f"unknown producer pair ({function_id!r})"))
        elif function_id not in model.producers_of(resource_id):
            found.append(
                Violation("invalid-producer", resource_id, f"{function_id} has no output edge to {resource_id}")
            )

    for e in model.edges:
        if e.src in res_ids and e.dst in fn_ids and math.isfinite(e.required_currency_s):
            if e.src not in model.default_producer:
                found.append(
                    Violation("missing-producer", e.src, f"consumed with finite currency by {e.dst}")
                )

    seen_roles: set[tuple[str, str]] = set()
    for role in model.roles:
        subject = f"{role.function}/{role.agent}"
        if (role.function, role.agent) in seen_roles:
            found.append(Violation("duplicate-role", subject))
        seen_roles.add((role.function, role.agent))
        if role.function not in fn_ids:
            found.append(Violation("unknown-role-ref", subject, f"unknown function {role.function!r}"))
        if role.agent not in agent_ids:
            found.append(Violation("unknown-role-ref", subject, f"unknown agent {role.agent!r}"))
        if role.authority and not role.competency:
            found.append(Violation("authority-without-competency", subject))

    unique = sorted(set(found), key=lambda v: (v.subject, v.rule, v.detail))
    return unique


def role_subgraph(model: JsatModel, agent: str, dimension: str = "authority") -> JsatModel:
    """Extract one agent's role subgraph along a competency/authority/responsibility dimension.

    The subgraph keeps the functions where the agent's flag is set, every
    resource adjacent to one of those functions, and all edges among the kept
    nodes. Its node and edge sets are subsets of the parent model's.
    """
    if agent not in model.agents_by_id:
        raise ValueError(f"unknown agent id: {agent!r}")
    if dimension not in ROLE_DIMENSIONS:
        raise ValueError(f"unknown role dimension: {dimension!r}")

    kept_fns = {
        r.function
        for r in model.roles
        if r.agent == agent and getattr(r, dimension) and r.function in model.functions_by_id
    }
    kept_res = {
        e.src if e.src in model.resources_by_id else e.dst
        for e in model.edges
        if (e.src in kept_fns and e.dst in model.resources_by_id)
        or (e.dst in kept_fns and e.src in model.resources_by_id)
    }
    kept = kept_fns | kept_res
    return JsatModel.build(
        resources=[r for r in model.resources if r.id in kept_res],
        functions=[f for f in model.functions if f.id in kept_fns],
        edges=[e for e in model.edges if e.src in kept and e.dst in kept],
        agents=model.agents,
        roles=[r for r in model.roles if r.function in kept_fns],
        default_producer={r: f for r, f in model.default_producer.items() if r in kept_res and f in kept_fns},
    )


@dataclass(frozen=True)
class CoordinationSubgraph:
    """The coordination-grounding/synchrony slice of a model.

    ``graph`` holds only coordination-layer nodes and the edges among them;
    ``boundary_edges`` are the edges that couple the coordination layers to
    the primary (taskwork/distributed-work) graph.
    """

    graph: JsatModel
    boundary_edges: tuple[CurrencyEdge, ...]


def coordination_subgraph(model: JsatModel) -> CoordinationSubgraph:
    """Slice out the coordination layers plus their boundary edges."""
    coord_res = {r.id for r in model.resources if r.layer == "coordination-grounding"}
    coord_fns = {f.id for f in model.functions if f.layer == "synchrony"}
    coord = coord_res | coord_fns

    internal = [e for e in model.edges if e.src in coord and e.dst in coord]
    boundary = tuple(
        e for e in model.edges if (e.src in coord) != (e.dst in coord)
    )
    graph = JsatModel.build(
        resources=[r for r in model.resources if r.id in coord_res],
        functions=[f for f in model.functions if f.id in coord_fns],
        edges=internal,
        agents=model.agents,
        roles=[r for r in model.roles if r.function in coord_fns],
        default_producer={r: f for r, f in model.default_producer.items() if r in coord_res and f in coord_fns},
    )
    return CoordinationSubgraph(graph=graph, boundary_edges=boundary)
