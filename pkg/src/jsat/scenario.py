"""Scenario files: one strategy parameterization of a simulation run.

A ``*.scenario.json`` document binds a model to a concrete world: the map
file (relative paths resolve against the scenario file), start pose, goal
point, navigation parameters, per-edge currency requirement overrides
(seconds or ``"inf"``), authority overrides pinning each joint-authority
function to one agent for the run, a wall-clock limit, and a seed recorded
for provenance. Unknown keys are rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from .io import ModelFormatError, bundled_asset_path
from .model import INFINITE, JsatModel
from .nav import NavParams, OccupancyGrid, Pose, load_grid

Point = tuple[float, float]


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to run one simulation besides the model itself."""

    true_map: OccupancyGrid
    start: Pose
    goal: Point
    nav: NavParams
    currency_overrides: Mapping[str, float] = field(default_factory=dict)
    authority_overrides: Mapping[str, str] = field(default_factory=dict)
    t_max_s: float = 1800.0
    seed: int = 0
    notes: str = ""

    def with_lad(self, lad: float) -> ScenarioConfig:
        return replace(self, nav=replace(self.nav, lad=lad))

    def with_currency(self, edge_key: str, seconds: float) -> ScenarioConfig:
        overrides = dict(self.currency_overrides)
        overrides[edge_key] = seconds
        return replace(self, currency_overrides=overrides)


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelFormatError("expected a number", where)
    return float(value)


def _currency(value, where: str) -> float:
    if value == "inf":
        return INFINITE
    return _number(value, where)


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Parse and sanity-check a scenario file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("scenario document must be an object")
    allowed = {"map", "start", "goal", "nav_params", "currency_overrides",
               "authority_overrides", "t_max_s", "seed", "notes"}
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ModelFormatError(f"unknown field(s): {', '.join(unknown)}")
    for key in ("map", "start", "goal"):
        if key not in doc:
            raise ModelFormatError(f"missing field: {key}")

    map_path = Path(doc["map"])
    if not map_path.is_absolute():
        map_path = path.parent / map_path
    true_map = load_grid(map_path)

    start = doc["start"]
    if not isinstance(start, list) or len(start) not in (2, 3):
        raise ModelFormatError("expected [x, y] or [x, y, theta]", "start")
    pose = Pose(*(_number(v, "start") for v in start))

    goal = doc["goal"]
    if not isinstance(goal, list) or len(goal) != 2:
        raise ModelFormatError("expected [x, y]", "goal")
    goal_pt = (_number(goal[0], "goal"), _number(goal[1], "goal"))

    nav_doc = doc.get("nav_params", {})
    if not isinstance(nav_doc, dict):
        raise ModelFormatError("expected an object", "nav_params")
    nav_unknown = sorted(set(nav_doc) - {"v", "dt", "arrival_radius", "lad", "turn_in_place"})
    if nav_unknown:
        raise ModelFormatError(f"unknown field(s): {', '.join(nav_unknown)}", "nav_params")
    defaults = NavParams()
    nav = NavParams(
        v=_number(nav_doc.get("v", defaults.v), "nav_params.v"),
        dt=_number(nav_doc.get("dt", defaults.dt), "nav_params.dt"),
        arrival_radius=_number(nav_doc.get("arrival_radius", defaults.arrival_radius), "nav_params.arrival_radius"),
        lad=_number(nav_doc.get("lad", defaults.lad), "nav_params.lad"),
        turn_in_place=bool(nav_doc.get("turn_in_place", True)),
    )
    nav.check()

    currencies = {}
    cur_doc = doc.get("currency_overrides", {})
    if not isinstance(cur_doc, dict):
        raise ModelFormatError("expected an object", "currency_overrides")
    for edge_key, value in cur_doc.items():
        tau = _currency(value, f"currency_overrides.{edge_key}")
        if math.isnan(tau) or tau < 0:
            raise ModelFormatError("currency must be nonnegative", f"currency_overrides.{edge_key}")
        currencies[edge_key] = tau

    auth_doc = doc.get("authority_overrides", {})
    if not isinstance(auth_doc, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in auth_doc.items()
    ):
        raise ModelFormatError("expected an object of function -> agent ids", "authority_overrides")

    return ScenarioConfig(
        true_map=true_map,
        start=pose,
        goal=goal_pt,
        nav=nav,
        currency_overrides=currencies,
        authority_overrides=dict(auth_doc),
        t_max_s=_number(doc.get("t_max_s", 1800.0), "t_max_s"),
        seed=int(doc.get("seed", 0)),
        notes=str(doc.get("notes", "")),
    )


def bundled_collab_nav_scenario() -> ScenarioConfig:
    """The bundled baseline scenario for the collaborative-navigation study."""
    return load_scenario(bundled_asset_path("collab_nav.scenario.json"))


def apply_currency_overrides(model: JsatModel, overrides: Mapping[str, float]) -> JsatModel:
    """Produce a model whose edge currencies reflect the scenario overrides."""
    known = {e.key for e in model.edges}
    missing = sorted(set(overrides) - known)
    if missing:
        raise ValueError(f"currency override(s) for unknown edge(s): {', '.join(missing)}")
    edges = tuple(
        replace(e, required_currency_s=overrides[e.key]) if e.key in overrides else e
        for e in model.edges
    )
    return replace(model, edges=edges)
