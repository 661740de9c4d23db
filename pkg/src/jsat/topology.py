"""Action-space topology analyses: modularity, community search, centrality.

Modularity here is the directed Newman form computed over the full bipartite
graph with unit edge weights:

    Q = (1/m) * sum_ij [A_ij - k_i_out * k_j_in / m] * delta(c_i, c_j)

so a single all-in-one community scores exactly zero on every graph. Role
partitions label every node with the agent that holds authority over it:
functions go to their authority holder, resources to the authority holder of
their default producer. Resources with no producer follow the majority of
their consumers (ties and orphans go to the lexicographically smallest
community label).

Eigenvector centralities are computed in both directions (incoming edges:
how much a node depends on influential upstream nodes; outgoing edges: how
much it enables downstream ones) by power iteration on the regularized
matrix M = A + eps * J with eps = 1e-3 / n, which guarantees a unique
positive dominant eigenvector on work graphs with sources, sinks, and
near-reducible structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .model import JsatModel

EXACT_SEARCH_NODE_LIMIT = 32
SCAN_JOINT_FUNCTION_LIMIT = 20


@dataclass(frozen=True)
class Partition:
    """A total assignment of node ids to community labels."""

    assignment: Mapping[str, str]

    def label(self, node_id: str) -> str:
        return self.assignment[node_id]

    def communities(self) -> dict[str, tuple[str, ...]]:
        groups: dict[str, list[str]] = {}
        for node, label in self.assignment.items():
            groups.setdefault(label, []).append(node)
        return {label: tuple(sorted(nodes)) for label, nodes in sorted(groups.items())}


def modularity(model: JsatModel, partition: Partition) -> float:
    """Directed Newman modularity of a partition over the full graph.

    Requires at least one edge and a partition covering every node.
    """
    m = len(model.edges)
    if m == 0:
        raise ValueError("modularity is undefined on a graph with no edges")
    missing = [n for n in model.node_ids if n not in partition.assignment]
    if missing:
        raise ValueError(f"partition does not cover node(s): {', '.join(missing[:5])}")

    labels = partition.assignment
    same_edges = sum(1 for e in model.edges if labels[e.src] == labels[e.dst])

    out_mass: dict[str, int] = {}
    in_mass: dict[str, int] = {}
    for e in model.edges:
        out_mass[labels[e.src]] = out_mass.get(labels[e.src], 0) + 1
        in_mass[labels[e.dst]] = in_mass.get(labels[e.dst], 0) + 1

    null = sum(out_mass.get(label, 0) * in_mass.get(label, 0) for label in set(out_mass) | set(in_mass))
    return same_edges / m - null / (m * m)


def attach_resources(model: JsatModel, function_labels: Mapping[str, str]) -> dict[str, str]:
    """Extend a function-only labeling to all nodes via the resource-attachment rule.

    A resource takes the label of its default producer; without one it takes
    the majority label among its consumers, breaking ties (and placing
    consumer-less resources) on the lexicographically smallest label in use.
    """
    if not function_labels:
        raise ValueError("cannot attach resources without function labels")
    smallest = min(set(function_labels.values()))
    labels = dict(function_labels)
    for r in model.resources:
        producer = model.default_producer.get(r.id)
        if producer is not None and producer in function_labels:
            labels[r.id] = function_labels[producer]
            continue
        counts: dict[str, int] = {}
        for consumer in model.consumers_of(r.id):
            if consumer in function_labels:
                label = function_labels[consumer]
                counts[label] = counts.get(label, 0) + 1
        if not counts:
            labels[r.id] = smallest
            continue
        best = max(counts.values())
        labels[r.id] = min(label for label, n in counts.items() if n == best)
    return labels


def best_bipartition(model: JsatModel, mode: str = "exact") -> tuple[Partition, float]:
    """Maximum-modularity split of the graph into two communities.

    Exact mode enumerates every assignment of function nodes to two
    communities (resources attached by the attachment rule) and is only
    permitted for models with at most 32 nodes; ties break toward the
    lexicographically smallest assignment vector over sorted function ids.
    Greedy mode hill-climbs single-function flips from the all-together
    split and must be requested explicitly on larger models.
    """
    if mode not in ("exact", "greedy"):
        raise ValueError(f"unknown mode: {mode!r}")
    fn_ids = [f.id for f in model.functions]
    if not fn_ids:
        raise ValueError("model has no function nodes")
    if mode == "exact" and len(model.node_ids) > EXACT_SEARCH_NODE_LIMIT:
        raise ValueError(
            f"exact search is limited to {EXACT_SEARCH_NODE_LIMIT} nodes "
            f"({len(model.node_ids)} present); request greedy mode"
        )

    def evaluate(bits: tuple[int, ...]) -> tuple[float, Partition]:
        fn_labels = {fid: str(bit) for fid, bit in zip(fn_ids, bits)}
        partition = Partition(attach_resources(model, fn_labels))
        return modularity(model, partition), partition

    if mode == "exact":
        # Complements are not equivalent: resource attachment breaks ties toward
        # the lexicographically smallest label in use, so all 2^n assignments
        # are searched.
        best_q = -np.inf
        best_bits: tuple[int, ...] | None = None
        best_partition: Partition | None = None
        for mask in range(1 << len(fn_ids)):
            bits = tuple((mask >> (len(fn_ids) - 1 - i)) & 1 for i in range(len(fn_ids)))
            q, partition = evaluate(bits)
            if q > best_q + 1e-15 or (abs(q - best_q) <= 1e-15 and (best_bits is None or bits < best_bits)):
                best_q, best_bits, best_partition = q, bits, partition
        assert best_partition is not None
        return best_partition, float(best_q)

    bits = [0] * len(fn_ids)
    current_q, current = evaluate(tuple(bits))
    while True:
        best_gain, best_idx = 0.0, None
        for i in range(len(fn_ids)):
            bits[i] ^= 1
            q, _ = evaluate(tuple(bits))
            bits[i] ^= 1
            if q - current_q > best_gain + 1e-12:
                best_gain, best_idx = q - current_q, i
        if best_idx is None:
            return current, float(current_q)
        bits[best_idx] ^= 1
        current_q, current = evaluate(tuple(bits))


def role_partition(model: JsatModel, authority_override: Mapping[str, str] | None = None) -> Partition:
    """Partition every node by the agent holding authority over it.

    Joint-authority functions must be pinned to a single holder through
    ``authority_override``; overrides may only name joint functions and must
    pick one of the function's actual authority holders.
    """
    override = dict(authority_override or {})
    joint = set(model.joint_authority_functions)
    for fn_id, agent in override.items():
        if fn_id not in joint:
            raise ValueError(f"override names non-joint function {fn_id!r}")
        if agent not in model.holders(fn_id):
            raise ValueError(f"{agent!r} holds no authority over {fn_id!r}")

    fn_labels: dict[str, str] = {}
    for f in model.functions:
        holders = model.holders(f.id)
        if f.id in override:
            fn_labels[f.id] = override[f.id]
        elif len(holders) == 1:
            fn_labels[f.id] = holders[0]
        elif len(holders) == 0:
            raise ValueError(f"function {f.id!r} has no authority holder")
        else:
            raise ValueError(f"joint-authority function {f.id!r} needs an override")
    return Partition(attach_resources(model, fn_labels))


@dataclass(frozen=True)
class ScanRow:
    """One shared-authority assignment and its modularity."""

    bitmask: int
    human_functions: tuple[str, ...]
    override: Mapping[str, str]
    q: float


@dataclass(frozen=True)
class RoleModularityScan:
    """Modularity across every single-holder assignment of joint functions."""

    joint_functions: tuple[str, ...]
    rows: tuple[ScanRow, ...]
    argmax: ScanRow
    argmin: ScanRow


def role_modularity_scan(model: JsatModel) -> RoleModularityScan:
    """Evaluate modularity for all 2^k assignments of the k joint-authority functions.

    Supports the dyad case: each joint function must have exactly one human
    and one robot authority holder. Bit i of the mask set means the i-th
    joint function (sorted by id) goes to the human agent.
    """
    joint = model.joint_authority_functions
    if len(joint) > SCAN_JOINT_FUNCTION_LIMIT:
        raise ValueError(f"{len(joint)} joint functions exceed the scan limit of {SCAN_JOINT_FUNCTION_LIMIT}")

    holder_pair: dict[str, tuple[str, str]] = {}
    for fn_id in joint:
        holders = model.holders(fn_id)
        kinds = {model.agents_by_id[a].kind for a in holders if a in model.agents_by_id}
        if len(holders) != 2 or kinds != {"human", "robot"}:
            raise ValueError(f"joint function {fn_id!r} needs exactly one human and one robot holder")
        human = next(a for a in holders if model.agents_by_id[a].kind == "human")
        robot = next(a for a in holders if model.agents_by_id[a].kind == "robot")
        holder_pair[fn_id] = (human, robot)

    rows: list[ScanRow] = []
    for mask in range(1 << len(joint)):
        override = {
            fn_id: holder_pair[fn_id][0] if mask & (1 << i) else holder_pair[fn_id][1]
            for i, fn_id in enumerate(joint)
        }
        q = modularity(model, role_partition(model, override))
        humans = tuple(fn_id for i, fn_id in enumerate(joint) if mask & (1 << i))
        rows.append(ScanRow(bitmask=mask, human_functions=humans, override=override, q=q))

    argmax = max(rows, key=lambda r: (r.q, -r.bitmask))
    argmin = min(rows, key=lambda r: (r.q, r.bitmask))
    return RoleModularityScan(joint_functions=joint, rows=tuple(rows), argmax=argmax, argmin=argmin)


@dataclass(frozen=True)
class NodeCentrality:
    node_id: str
    kind: str  # "function" | "resource"
    layer: str
    in_degree: int
    out_degree: int
    eig_in: float
    eig_out: float


@dataclass(frozen=True)
class CentralityReport:
    """Degree and bidirectional eigenvector centralities with convergence metadata."""

    nodes: tuple[NodeCentrality, ...]
    iterations_in: int
    residual_in: float
    iterations_out: int
    residual_out: float

    def by_id(self) -> dict[str, NodeCentrality]:
        return {n.node_id: n for n in self.nodes}

    def top(self, attr: str, kind: str | None = None, n: int = 3) -> tuple[str, ...]:
        """Ids of the n highest-scoring nodes by one attribute, optionally per kind."""
        pool = [c for c in self.nodes if kind is None or c.kind == kind]
        pool.sort(key=lambda c: (-getattr(c, attr), c.node_id))
        return tuple(c.node_id for c in pool[:n])


MAX_POWER_ITERATIONS = 10_000
POWER_TOLERANCE = 1e-10


def _power_iteration(matrix: np.ndarray) -> tuple[np.ndarray, int, float]:
    n = matrix.shape[0]
    x = np.full(n, 1.0 / np.sqrt(n))
    iterations = 0
    for iterations in range(1, MAX_POWER_ITERATIONS + 1):
        y = matrix @ x
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            break
        x_next = y / norm
        rayleigh = float(x_next @ (matrix @ x_next))
        residual = float(np.linalg.norm(matrix @ x_next - rayleigh * x_next))
        x = x_next
        if residual < POWER_TOLERANCE:
            return x, iterations, residual
    rayleigh = float(x @ (matrix @ x))
    return x, iterations, float(np.linalg.norm(matrix @ x - rayleigh * x))


def centrality(model: JsatModel) -> CentralityReport:
    """Degree counts plus eig_in/eig_out scores for every node.

    eig_in is the dominant eigenvector of the transposed (regularized)
    adjacency: high scores mean heavy dependence on influential upstream
    nodes. eig_out uses the forward direction: high scores mean the node
    feeds many influential downstream nodes. Both vectors have unit
    Euclidean norm. Non-convergence is reported in the metadata rather
    than raised.
    """
    ids = list(model.node_ids)
    if not ids:
        raise ValueError("centrality is undefined on an empty graph")
    index = {node_id: i for i, node_id in enumerate(ids)}
    n = len(ids)
    adjacency = np.zeros((n, n))
    for e in model.edges:
        adjacency[index[e.src], index[e.dst]] += 1.0

    eps = 1e-3 / n
    forward = adjacency + eps
    backward = adjacency.T + eps

    x_out, it_out, res_out = _power_iteration(forward)
    x_in, it_in, res_in = _power_iteration(backward)

    nodes = []
    for node_id in ids:
        i = index[node_id]
        if node_id in model.functions_by_id:
            kind, layer = "function", model.functions_by_id[node_id].layer
        else:
            kind, layer = "resource", model.resources_by_id[node_id].layer
        nodes.append(
            NodeCentrality(
                node_id=node_id,
                kind=kind,
                layer=layer,
                in_degree=int(adjacency[:, i].sum()),
                out_degree=int(adjacency[i, :].sum()),
                eig_in=float(x_in[i]),
                eig_out=float(x_out[i]),
            )
        )
    return CentralityReport(
        nodes=tuple(nodes),
        iterations_in=it_in,
        residual_in=res_in,
        iterations_out=it_out,
        residual_out=res_out,
    )


def combined_resource_rank(report: CentralityReport) -> tuple[str, ...]:
    """Resources ordered by combined centrality (eig_in + eig_out, descending)."""
    pool = [c for c in report.nodes if c.kind == "resource"]
    pool.sort(key=lambda c: (-(c.eig_in + c.eig_out), c.node_id))
    return tuple(c.node_id for c in pool)
