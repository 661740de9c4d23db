"""Computational behaviors bound to the case-study functions.

Each binding reads and writes resource values on the shared world state; the
engine handles currency stamping and event recording. Functions marked
``not-modeled`` refresh their outputs without computing values.

Waypoint selection is range-limited: it targets the farthest path waypoint
within the look-ahead distance whose direct leg crosses only cells known to
be free, so the robot drives straight legs of roughly look-ahead length and
re-selects on arrival. With stale plans or stale obstacle knowledge those
legs can cross debris, which is exactly the synchrony failure the unsafe-zone
metric detects.

The location/attitude assessment is an idealized perfect estimator: its
modeled means are the camera imagery and terrain map, and it reproduces the
true robot state exactly (no sensor error is modeled).
"""

from __future__ import annotations

from dataclasses import replace

from .nav import (
    PlannedPath,
    distance,
    next_waypoint,
    plan_path,
    plan_path_soft,
    reached_prefix_index,
    segment_known_free,
    sense_obstacles,
    unicycle_step,
)
from .sim import World


def unicycle_move(world: World, now: float) -> None:
    """Drive one tick toward the current waypoint and refresh the robot state."""
    target = world.value("NWP")
    if target is not None:
        new_pose = unicycle_step(world.pose, target, world.scenario.nav)
        world.distance_m += distance(world.pose.point, new_pose.point)
        world.pose = new_pose
    world.set_value("RS", world.pose)
    world.set_value("GR", distance(world.pose.point, world.goal) <= world.scenario.nav.arrival_radius)


def select_waypoint(world: World, now: float) -> None:
    """Pick the next drive target from the planned path.

    Scans past the already-reached prefix for the farthest waypoint within
    the look-ahead distance reachable over known-free cells in a straight
    leg; falls back to the next waypoint beyond the arrival radius, then to
    the final waypoint. Sets no waypoint when there is no plan.
    """
    path: PlannedPath | None = world.value("PP")
    if path is None or not path.waypoints:
        world.set_value("NWP", None)
        return
    nav = world.scenario.nav
    pose = world.pose
    known = world.value("OL")
    start = reached_prefix_index(path, pose, nav.arrival_radius) + 1
    own_cell = known.cell_of(pose.point) if known is not None else None

    chosen = None
    for i in range(len(path.waypoints) - 1, start - 1, -1):
        w = path.waypoints[i]
        if distance(pose.point, w) > nav.lad or distance(pose.point, w) <= nav.arrival_radius:
            continue
        if known is None or segment_known_free(known, pose.point, w, allow=own_cell):
            chosen = w
            break
    if chosen is None:
        chosen = next_waypoint(path, pose, nav)
    world.set_value("NWP", chosen)


def plan_robot_path(world: World, now: float) -> None:
    """Replan from the assessed robot position to the goal over the known map.

    The robot can always leave the cell it is standing in, so a start cell
    that is known-occupied (after driving through debris on a stale plan) is
    treated as free for this plan only.
    """
    known = world.value("OL")
    start_pose = world.value("ORS") or world.pose
    goal = world.value("GL") or world.goal
    start_cell = known.cell_of(start_pose.point)
    if known.in_bounds(start_cell) and known.occupied(start_cell):
        known = known.copy()
        known.cells[start_cell[0], start_cell[1]] = False
    path = plan_path(known, start_pose.point, goal, planned_at=now)
    if path is None:
        # debris marks unsafe zones, not walls: escape at a heavy cost penalty
        path = plan_path_soft(known, start_pose.point, goal, planned_at=now)
    world.set_value("PP", path)


def localize_obstacles(world: World, now: float) -> None:
    """Reveal the true occupancy within the look-ahead radius of the assessed pose."""
    true_map = world.value("TM")
    known = world.value("OL")
    pose = world.value("ORS") or world.pose
    world.set_value("OL", sense_obstacles(true_map, known, pose, world.scenario.nav.lad))


def assess_pose(world: World, now: float) -> None:
    """Refresh the observed robot state (perfect-estimator idealization)."""
    world.set_value("ORS", replace(world.pose))


BEHAVIORS = {
    "unicycle-move": unicycle_move,
    "waypoint-select": select_waypoint,
    "astar-plan": plan_robot_path,
    "sense-obstacles": localize_obstacles,
    "assess-pose": assess_pose,
}
