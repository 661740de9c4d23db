"""Fast-time discrete-event execution of a work graph.

The engine actualizes the model: a primary control loop integrates robot
motion every tick and triggers waypoint selection on arrival; any function
execution first resolves its inputs' information currency. For each consumed
resource with a finite required currency, if the resource's age exceeds the
requirement at the trigger time, the resource's default producer executes
first, recursively, all at the same timestamp (functions are instantaneous).
A resource that has never been written resolves its producer once regardless
of the requirement, which bootstraps the whole graph on first demand.

Cycles in the resolution (read-write pairs and mutual dependencies) are cut:
re-entering a function already on the resolution stack emits a
``cycle-cut-warning`` event and accepts the resource as-is.

Every execution stamps all of the function's output resources with the
current time and the executing agent. An ``exchange`` event is recorded for
each consumed resource whose last writer is a different agent, which is the
coordination-load proxy aggregated by the sweep harness.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .model import INFINITE, JsatModel
from .nav import NavParams, OccupancyGrid, Pose, UnsafeMonitor, distance
from .scenario import ScenarioConfig, apply_currency_overrides
from .model import validate as validate_model

EVENT_KINDS = ("function-exec", "exchange", "unsafe-entry", "goal-reached", "cycle-cut-warning")
PRIMARY_LOOP = "primary-loop"

#: Resources whose initial values are fixed world conditions; they start
#: stamped at t=0. Everything else starts unwritten and is produced on demand.
INITIALIZED_RESOURCES = ("RS", "GL", "TM", "OS", "GR")


class SimulationError(RuntimeError):
    """A scenario/model combination the engine cannot execute."""


@dataclass(frozen=True, slots=True)
class SimEvent:
    time: float
    kind: str
    function: str = ""
    agent: str = ""
    triggered_by: str = ""
    detail: str = ""


@dataclass(frozen=True)
class SimTrace:
    """Ordered event record of one run."""

    events: tuple[SimEvent, ...]
    final_time: float
    termination: str  # "goal" | "time-limit" | "deadlock"
    trajectory: tuple[tuple[float, float, float, float], ...]  # (t, x, y, theta)
    distance_m: float

    def count(self, kind: str) -> int:
        return sum(1 for e in self.events if e.kind == kind)

    def executions(self, function: str) -> int:
        return sum(1 for e in self.events if e.kind == "function-exec" and e.function == function)


def count_exchanges(trace: SimTrace) -> int:
    """Number of cross-agent information exchanges recorded in a trace."""
    return trace.count("exchange")


@dataclass
class ResourceState:
    value: Any = None
    last_updated: float | None = None  # None = never written
    last_writer: str | None = None

    def age(self, now: float) -> float:
        if self.last_updated is None:
            return math.inf
        return now - self.last_updated


@dataclass
class World:
    """Mutable run state shared by the engine and the behavior bindings."""

    model: JsatModel
    scenario: ScenarioConfig
    authority: Mapping[str, str]
    behaviors: Mapping[str, Callable[["World", float], None]]
    resources: dict[str, ResourceState] = field(default_factory=dict)
    pose: Pose = Pose(0.0, 0.0)
    goal: tuple[float, float] = (0.0, 0.0)
    distance_m: float = 0.0
    events: list[SimEvent] = field(default_factory=list)

    def state(self, resource_id: str) -> ResourceState:
        return self.resources[resource_id]

    def value(self, resource_id: str) -> Any:
        return self.resources[resource_id].value

    def set_value(self, resource_id: str, value: Any) -> None:
        self.resources[resource_id].value = value


def build_authority(model: JsatModel, scenario: ScenarioConfig) -> dict[str, str]:
    """Resolve every function to its single executing agent for this run."""
    authority: dict[str, str] = {}
    joint = set(model.joint_authority_functions)
    overrides = dict(scenario.authority_overrides)
    for fn_id, agent in overrides.items():
        if fn_id not in model.functions_by_id:
            raise SimulationError(f"authority override names unknown function {fn_id!r}")
        if fn_id not in joint:
            raise SimulationError(f"authority override names non-joint function {fn_id!r}")
        if agent not in model.holders(fn_id):
            raise SimulationError(f"{agent!r} holds no authority over {fn_id!r}")
    for f in model.functions:
        holders = model.holders(f.id)
        if f.id in overrides:
            authority[f.id] = overrides[f.id]
        elif len(holders) == 1:
            authority[f.id] = holders[0]
        elif len(holders) > 1:
            raise SimulationError(f"joint-authority function {f.id!r} needs an authority override")
        # functions with no holder stay unbound; executing one raises
    return authority


def make_world(model: JsatModel, scenario: ScenarioConfig,
               behaviors: Mapping[str, Callable[[World, float], None]]) -> World:
    """Validate inputs and assemble the initial world state."""
    scenario.nav.check()
    effective = apply_currency_overrides(model, scenario.currency_overrides)
    violations = validate_model(effective)
    if violations:
        raise SimulationError(
            "scenario produces an invalid model: " + "; ".join(str(v) for v in violations[:5])
        )
    for f in effective.functions:
        if f.behavior != "not-modeled" and f.behavior not in behaviors:
            raise SimulationError(f"no behavior binding for {f.behavior!r} (function {f.id})")

    world = World(
        model=effective,
        scenario=scenario,
        authority=build_authority(effective, scenario),
        behaviors=behaviors,
        pose=scenario.start,
        goal=scenario.goal,
    )
    for r in effective.resources:
        world.resources[r.id] = ResourceState()
    tm = scenario.true_map
    known = OccupancyGrid.empty(tm.width, tm.height, tm.cell_size, tm.origin)
    initial_values = {
        "RS": scenario.start,
        "GL": scenario.goal,
        "TM": tm,
        "OS": "from-terrain-map",
        "GR": False,
        "OL": known,
    }
    for rid, value in initial_values.items():
        if rid in world.resources:
            world.resources[rid].value = value
    for rid in INITIALIZED_RESOURCES:
        if rid in world.resources:
            world.resources[rid].last_updated = 0.0
    return world


def resolve_and_execute(
    world: World,
    function_id: str,
    now: float,
    triggered_by: str = PRIMARY_LOOP,
    _stack: tuple[str, ...] = (),
) -> list[SimEvent]:
    """Execute a function after recursively refreshing its stale inputs.

    Returns the events appended (producers first, depth-first; then this
    function's execution, then one exchange event per consumed resource last
    written by another agent). Every event carries the same timestamp.
    """
    model = world.model
    if function_id not in model.functions_by_id:
        raise SimulationError(f"unknown function {function_id!r}")
    if function_id in _stack:
        event = SimEvent(
            time=now,
            kind="cycle-cut-warning",
            function=function_id,
            triggered_by=triggered_by,
            detail="resolution cycle cut",
        )
        world.events.append(event)
        return [event]

    agent = world.authority.get(function_id)
    if agent is None:
        raise SimulationError(f"function {function_id!r} has no authority holder")

    appended: list[SimEvent] = []
    stack = _stack + (function_id,)
    for edge in model.inputs_of(function_id):
        state = world.state(edge.src)
        never_written = state.last_updated is None
        stale = math.isfinite(edge.required_currency_s) and state.age(now) > edge.required_currency_s
        if not (never_written or stale):
            continue
        producer = model.default_producer.get(edge.src)
        if producer is None:
            if stale:
                raise SimulationError(
                    f"resource {edge.src!r} is stale for {function_id!r} but has no producer"
                )
            continue  # unwritten fixed input; behaviors must tolerate it
        appended.extend(resolve_and_execute(world, producer, now, function_id, stack))

    consumed = [(e.src, world.state(e.src).last_writer) for e in model.inputs_of(function_id)]

    behavior_key = model.functions_by_id[function_id].behavior
    behavior = world.behaviors.get(behavior_key)
    if behavior is not None:
        behavior(world, now)

    for edge in model.outputs_of(function_id):
        state = world.state(edge.dst)
        state.last_updated = now
        state.last_writer = agent

    exec_event = SimEvent(
        time=now, kind="function-exec", function=function_id, agent=agent, triggered_by=triggered_by
    )
    world.events.append(exec_event)
    appended.append(exec_event)
    for resource_id, writer in consumed:
        if writer is not None and writer != agent:
            event = SimEvent(
                time=now,
                kind="exchange",
                function=function_id,
                agent=agent,
                triggered_by=triggered_by,
                detail=f"resource={resource_id};writer={writer}",
            )
            world.events.append(event)
            appended.append(event)
    return appended


def _function_with_behavior(model: JsatModel, key: str) -> str:
    matches = [f.id for f in model.functions if f.behavior == key]
    if len(matches) != 1:
        raise SimulationError(f"need exactly one function bound to {key!r}, found {len(matches)}")
    return matches[0]


def run(model: JsatModel, scenario: ScenarioConfig,
        behaviors: Mapping[str, Callable[[World, float], None]] | None = None) -> SimTrace:
    """Execute the primary control loop to termination.

    Each tick the movement function drives toward the current waypoint; on
    arrival the waypoint-selection function is triggered (resolving plan and
    map currencies as needed). Terminates on goal arrival, on the scenario
    time limit, or on deadlock (no route available). Deterministic for a
    given (model, scenario) pair.
    """
    if behaviors is None:
        from .behaviors import BEHAVIORS

        behaviors = BEHAVIORS
    world = make_world(model, scenario, behaviors)
    move_fn = _function_with_behavior(world.model, "unicycle-move")
    select_fn = _function_with_behavior(world.model, "waypoint-select")
    nav = scenario.nav
    trajectory: list[tuple[float, float, float, float]] = []
    now = 0.0
    trajectory.append((now, world.pose.x, world.pose.y, world.pose.theta))
    monitor = UnsafeMonitor(scenario.true_map)
    monitor.update(world.pose)  # starting inside debris counts as already-inside
    termination = "time-limit"

    def at_goal() -> bool:
        return distance(world.pose.point, world.goal) <= nav.arrival_radius

    def waypoint() -> tuple[float, float] | None:
        return world.value("NWP")

    while True:
        if at_goal():
            world.events.append(
                SimEvent(time=now, kind="goal-reached", triggered_by=PRIMARY_LOOP)
            )
            termination = "goal"
            break
        if waypoint() is None:
            resolve_and_execute(world, select_fn, now, PRIMARY_LOOP)
            if waypoint() is None:
                termination = "deadlock"
                world.events.append(
                    SimEvent(time=now, kind="cycle-cut-warning", function=select_fn,
                             triggered_by=PRIMARY_LOOP, detail="no waypoint available: deadlock")
                )
                break
        if now + nav.dt > scenario.t_max_s + 1e-9:
            termination = "time-limit"
            break
        now = round(now + nav.dt, 9)
        resolve_and_execute(world, move_fn, now, PRIMARY_LOOP)
        trajectory.append((now, world.pose.x, world.pose.y, world.pose.theta))
        detail = monitor.update(world.pose)
        if detail is not None:
            world.events.append(
                SimEvent(time=now, kind="unsafe-entry", triggered_by=PRIMARY_LOOP, detail=detail)
            )
        target = waypoint()
        if target is not None and not at_goal() and distance(world.pose.point, target) <= nav.arrival_radius:
            previous = target
            resolve_and_execute(world, select_fn, now, PRIMARY_LOOP)
            if waypoint() is None:
                termination = "deadlock"
                world.events.append(
                    SimEvent(time=now, kind="cycle-cut-warning", function=select_fn,
                             triggered_by=PRIMARY_LOOP, detail="no waypoint available: deadlock")
                )
                break
            if waypoint() == previous:
                # selector cannot advance past an already-reached target
                termination = "deadlock"
                world.events.append(
                    SimEvent(time=now, kind="cycle-cut-warning", function=select_fn,
                             triggered_by=PRIMARY_LOOP, detail="waypoint not advancing: deadlock")
                )
                break

    return SimTrace(
        events=tuple(world.events),
        final_time=now,
        termination=termination,
        trajectory=tuple(trajectory),
        distance_m=world.distance_m,
    )


TRACE_HEADER = "time_s,kind,function,agent,triggered_by,detail"


def trace_to_csv(trace: SimTrace) -> str:
    """Serialize a trace to CSV (times to 3 decimal places)."""
    out = io.StringIO()
    out.write(TRACE_HEADER + "\n")
    for e in trace.events:
        detail = e.detail.replace(",", ";")
        out.write(f"{e.time:.3f},{e.kind},{e.function},{e.agent},{e.triggered_by},{detail}\n")
    return out.getvalue()


def trajectory_to_csv(trace: SimTrace) -> str:
    """Serialize per-tick pose samples to CSV."""
    out = io.StringIO()
    out.write("time_s,x_m,y_m,theta_rad\n")
    for t, x, y, theta in trace.trajectory:
        out.write(f"{t:.3f},{x:.6f},{y:.6f},{theta:.6f}\n")
    return out.getvalue()
