"""Graph-based modeling and fast-time simulation of human-robot joint work.

The package couples a layered directed-bipartite work-graph model with
role-partition topology analyses (modularity, community search, degree and
eigenvector centralities) and a currency-driven discrete-event simulator,
plus a collaborative-navigation case study and a strategy trade-space sweep
harness.
"""

from .io import bundled_collab_nav_model, load_model, save_model
from .model import (
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
from .replay import replay_check
from .scenario import ScenarioConfig, bundled_collab_nav_scenario, load_scenario
from .sim import SimEvent, SimTrace, count_exchanges, run
from .sweep import SweepGrid, frontier, run_sweep
from .topology import (
    CentralityReport,
    Partition,
    best_bipartition,
    centrality,
    modularity,
    role_modularity_scan,
    role_partition,
)

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "CentralityReport",
    "CurrencyEdge",
    "FunctionNode",
    "JsatModel",
    "Partition",
    "ResourceNode",
    "RoleAssignment",
    "ScenarioConfig",
    "SimEvent",
    "SimTrace",
    "SweepGrid",
    "best_bipartition",
    "bundled_collab_nav_model",
    "bundled_collab_nav_scenario",
    "centrality",
    "coordination_subgraph",
    "count_exchanges",
    "frontier",
    "load_model",
    "load_scenario",
    "modularity",
    "replay_check",
    "role_modularity_scan",
    "role_partition",
    "role_subgraph",
    "run",
    "run_sweep",
    "save_model",
    "validate",
]
