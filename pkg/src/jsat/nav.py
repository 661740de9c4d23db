"""Navigation behaviors for the collaborative-navigation case study.

Unicycle kinematics, occupancy-grid world, range-limited obstacle sensing,
A* planning over the known map, waypoint selection, and unsafe-cell checks.

Grid convention: cell (row, col) covers the world square
[origin_x + col*cell, origin_x + (col+1)*cell) x [origin_y + row*cell, ...),
so the cell center is origin + ((col+0.5)*cell, (row+0.5)*cell). Grid files
are plain text: first line ``width height cell_size``, then ``height`` rows
of ``0``/``1`` characters, row 0 first.

Planning uses 8-connected moves with Euclidean heuristic and sqrt(2) diagonal
cost; a diagonal move requires both orthogonally adjacent cells to be free
(no corner cutting), so a robot tracking the path never clips an occupied
cell corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from heapq import heappop, heappush
from pathlib import Path

import numpy as np

Point = tuple[float, float]
Cell = tuple[int, int]  # (row, col)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, slots=True)
class Pose:
    """Planar position (meters) and heading (radians, normalized to (-pi, pi])."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def point(self) -> Point:
        return (self.x, self.y)


def normalize_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    """Boolean occupancy field over a regular grid."""

    cells: np.ndarray  # shape (height, width), dtype bool
    cell_size: float
    origin: Point = (0.0, 0.0)

    def __post_init__(self):
        if self.cells.ndim != 2:
            raise ValueError("occupancy cells must be a 2-D array")
        if self.cell_size <= 0:
            raise ValueError("cell_size must be positive")

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @classmethod
    def empty(cls, width: int, height: int, cell_size: float, origin: Point = (0.0, 0.0)) -> OccupancyGrid:
        return cls(cells=np.zeros((height, width), dtype=bool), cell_size=cell_size, origin=origin)

    def copy(self) -> OccupancyGrid:
        return replace(self, cells=self.cells.copy())

    def congruent(self, other: OccupancyGrid) -> bool:
        return (
            self.cells.shape == other.cells.shape
            and self.cell_size == other.cell_size
            and self.origin == other.origin
        )

    def cell_of(self, point: Point) -> Cell:
        col = int(math.floor((point[0] - self.origin[0]) / self.cell_size))
        row = int(math.floor((point[1] - self.origin[1]) / self.cell_size))
        return (row, col)

    def in_bounds(self, cell: Cell) -> bool:
        row, col = cell
        return 0 <= row < self.height and 0 <= col < self.width

    def center(self, cell: Cell) -> Point:
        row, col = cell
        return (
            self.origin[0] + (col + 0.5) * self.cell_size,
            self.origin[1] + (row + 0.5) * self.cell_size,
        )

    def occupied(self, cell: Cell) -> bool:
        return bool(self.cells[cell[0], cell[1]])

    def occupied_count(self) -> int:
        return int(self.cells.sum())


def load_grid(path: str | Path) -> OccupancyGrid:
    """Read a grid file (``width height cell_size`` header, then 0/1 rows)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty grid file")
    header = lines[0].split()
    if len(header) != 3:
        raise ValueError(f"{path}: header must be 'width height cell_size'")
    width, height, cell_size = int(header[0]), int(header[1]), float(header[2])
    rows = [line.strip() for line in lines[1:] if line.strip()]
    if len(rows) != height:
        raise ValueError(f"{path}: expected {height} rows, found {len(rows)}")
    cells = np.zeros((height, width), dtype=bool)
    for r, row in enumerate(rows):
        if len(row) != width or set(row) - {"0", "1"}:
            raise ValueError(f"{path}: row {r} must be {width} characters of 0/1")
        cells[r] = [c == "1" for c in row]
    return OccupancyGrid(cells=cells, cell_size=cell_size)


def save_grid(grid: OccupancyGrid) -> str:
    """Render a grid to its text file form."""
    size = int(grid.cell_size) if float(grid.cell_size).is_integer() else grid.cell_size
    lines = [f"{grid.width} {grid.height} {size}"]
    for r in range(grid.height):
        lines.append("".join("1" if grid.cells[r, c] else "0" for c in range(grid.width)))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, slots=True)
class PlannedPath:
    """Ordered list of world-coordinate waypoints (consecutive cell centers)."""

    waypoints: tuple[Point, ...]
    planned_at: float = 0.0


@dataclass(frozen=True, slots=True)
class NavParams:
    """Motion and selection parameters for the navigation loop."""

    v: float = 0.5
    dt: float = 0.5
    arrival_radius: float = 0.25
    lad: float = 6.0
    turn_in_place: bool = True

    def check(self) -> None:
        if not (self.v > 0 and self.dt > 0 and self.arrival_radius > 0 and self.lad > 0):
            raise ValueError("v, dt, arrival_radius, and lad must all be positive")
        if not self.turn_in_place:
            raise ValueError("only turn-in-place heading alignment is modeled")


def distance(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def unicycle_step(pose: Pose, target: Point, params: NavParams) -> Pose:
    """Advance one tick toward a target: snap heading, move min(v*dt, range).

    Inside the arrival radius the pose only re-orients; the step never
    overshoots the target.
    """
    d = distance(pose.point, target)
    if d == 0.0:
        return pose
    heading = math.atan2(target[1] - pose.y, target[0] - pose.x)
    if d < params.arrival_radius:
        return replace(pose, theta=normalize_angle(heading))
    step = min(params.v * params.dt, d)
    return Pose(pose.x + step * math.cos(heading), pose.y + step * math.sin(heading), heading)


def sense_obstacles(true_map: OccupancyGrid, known_map: OccupancyGrid, pose: Pose, lad: float) -> OccupancyGrid:
    """Copy the true occupancy of every cell whose center is within `lad` of the pose.

    Knowledge persists: cells beyond range keep their previous known state.
    Returns a new grid; inputs are not mutated.
    """
    if not true_map.congruent(known_map):
        raise ValueError("true and known maps must have identical geometry")
    rows = (np.arange(true_map.height) + 0.5) * true_map.cell_size + true_map.origin[1]
    cols = (np.arange(true_map.width) + 0.5) * true_map.cell_size + true_map.origin[0]
    dy2 = (rows - pose.y) ** 2
    dx2 = (cols - pose.x) ** 2
    mask = dy2[:, None] + dx2[None, :] <= lad * lad
    cells = known_map.cells.copy()
    cells[mask] = true_map.cells[mask]
    return replace(known_map, cells=cells)


_ORTHO = ((-1, 0), (1, 0), (0, -1), (0, 1))
_DIAG = ((-1, -1), (-1, 1), (1, -1), (1, 1))


def neighbors(grid: OccupancyGrid, cell: Cell):
    """Free 8-connected successors with step cost; diagonals may not cut corners."""
    row, col = cell
    for dr, dc in _ORTHO:
        nxt = (row + dr, col + dc)
        if grid.in_bounds(nxt) and not grid.occupied(nxt):
            yield nxt, 1.0
    for dr, dc in _DIAG:
        nxt = (row + dr, col + dc)
        if not grid.in_bounds(nxt) or grid.occupied(nxt):
            continue
        if grid.occupied((row + dr, col)) or grid.occupied((row, col + dc)):
            continue
        yield nxt, SQRT2


def plan_path(known_map: OccupancyGrid, start: Point, goal: Point, planned_at: float = 0.0) -> PlannedPath | None:
    """Optimal A* route over known-free cells from start to goal, or None.

    Ties break on lowest f, then lowest h, then row-major cell index, making
    the returned path deterministic across platforms. The path is the list of
    traversed cell centers, starting at the start cell's center.
    """
    start_cell = known_map.cell_of(start)
    goal_cell = known_map.cell_of(goal)
    if not known_map.in_bounds(start_cell) or known_map.occupied(start_cell):
        raise ValueError(f"start cell {start_cell} is occupied or out of bounds in the known map")
    if not known_map.in_bounds(goal_cell) or known_map.occupied(goal_cell):
        return None

    def heuristic(cell: Cell) -> float:
        dr = abs(cell[0] - goal_cell[0])
        dc = abs(cell[1] - goal_cell[1])
        return (dr + dc) + (SQRT2 - 2.0) * min(dr, dc)

    def index(cell: Cell) -> int:
        return cell[0] * known_map.width + cell[1]

    open_heap: list[tuple[float, float, int, Cell]] = []
    heappush(open_heap, (heuristic(start_cell), heuristic(start_cell), index(start_cell), start_cell))
    g_score: dict[Cell, float] = {start_cell: 0.0}
    came_from: dict[Cell, Cell] = {}
    closed: set[Cell] = set()

    while open_heap:
        _, _, _, current = heappop(open_heap)
        if current in closed:
            continue
        if current == goal_cell:
            cells = [current]
            while current in came_from:
                current = came_from[current]
                cells.append(current)
            cells.reverse()
            return PlannedPath(
                waypoints=tuple(known_map.center(c) for c in cells), planned_at=planned_at
            )
        closed.add(current)
        for nxt, cost in neighbors(known_map, current):
            tentative = g_score[current] + cost
            if tentative < g_score.get(nxt, math.inf) - 1e-12:
                g_score[nxt] = tentative
                came_from[nxt] = current
                f = tentative + heuristic(nxt)
                heappush(open_heap, (f, heuristic(nxt), index(nxt), nxt))
    return None


def path_cost(path: PlannedPath, cell_size: float = 1.0) -> float:
    """Total length of a path in units of cells."""
    pts = path.waypoints
    return sum(distance(a, b) for a, b in zip(pts, pts[1:])) / cell_size


UNSAFE_STEP_PENALTY = 50.0


def plan_path_soft(known_map: OccupancyGrid, start: Point, goal: Point,
                   planned_at: float = 0.0, penalty: float = UNSAFE_STEP_PENALTY) -> PlannedPath | None:
    """A* treating known-occupied cells as crossable at a heavy cost penalty.

    Used when no route exists through known-free cells: debris marks unsafe
    driving zones rather than walls, so a trapped robot plans the cheapest
    escape instead of stalling. Same determinism rules as :func:`plan_path`.
    """
    start_cell = known_map.cell_of(start)
    goal_cell = known_map.cell_of(goal)
    if not known_map.in_bounds(start_cell) or not known_map.in_bounds(goal_cell):
        return None

    def heuristic(cell: Cell) -> float:
        dr = abs(cell[0] - goal_cell[0])
        dc = abs(cell[1] - goal_cell[1])
        return (dr + dc) + (SQRT2 - 2.0) * min(dr, dc)

    def index(cell: Cell) -> int:
        return cell[0] * known_map.width + cell[1]

    open_heap: list[tuple[float, float, int, Cell]] = []
    heappush(open_heap, (heuristic(start_cell), heuristic(start_cell), index(start_cell), start_cell))
    g_score: dict[Cell, float] = {start_cell: 0.0}
    came_from: dict[Cell, Cell] = {}
    closed: set[Cell] = set()
    while open_heap:
        _, _, _, current = heappop(open_heap)
        if current in closed:
            continue
        if current == goal_cell:
            cells = [current]
            while current in came_from:
                current = came_from[current]
                cells.append(current)
            cells.reverse()
            return PlannedPath(tuple(known_map.center(c) for c in cells), planned_at=planned_at)
        closed.add(current)
        row, col = current
        for dr, dc in _ORTHO + _DIAG:
            nxt = (row + dr, col + dc)
            if not known_map.in_bounds(nxt):
                continue
            base = SQRT2 if dr and dc else 1.0
            cost = base * (penalty if known_map.occupied(nxt) else 1.0)
            tentative = g_score[current] + cost
            if tentative < g_score.get(nxt, math.inf) - 1e-12:
                g_score[nxt] = tentative
                came_from[nxt] = current
                heappush(open_heap, (tentative + heuristic(nxt), heuristic(nxt), index(nxt), nxt))
    return None


def reached_prefix_index(path: PlannedPath, pose: Pose, arrival_radius: float) -> int:
    """Index of the furthest-along waypoint within the arrival radius, or -1."""
    idx = -1
    for i, w in enumerate(path.waypoints):
        if distance(pose.point, w) <= arrival_radius:
            idx = i
    return idx


def next_waypoint(path: PlannedPath, pose: Pose, params: NavParams) -> Point:
    """First path waypoint beyond the arrival radius, past the reached prefix.

    Falls back to the final waypoint when every remaining waypoint is already
    within the arrival radius.
    """
    if not path.waypoints:
        raise ValueError("path has no waypoints")
    start = reached_prefix_index(path, pose, params.arrival_radius) + 1
    for w in path.waypoints[start:]:
        if distance(pose.point, w) > params.arrival_radius:
            return w
    return path.waypoints[-1]


def raycast_cells(grid: OccupancyGrid, a: Point, b: Point) -> list[Cell]:
    """Every cell the segment a->b touches (conservative at corner crossings)."""
    cells: list[Cell] = []
    seen: set[Cell] = set()

    def visit(cell: Cell) -> None:
        if cell not in seen:
            seen.add(cell)
            cells.append(cell)

    cs = grid.cell_size
    ax = (a[0] - grid.origin[0]) / cs
    ay = (a[1] - grid.origin[1]) / cs
    bx = (b[0] - grid.origin[0]) / cs
    by = (b[1] - grid.origin[1]) / cs
    col, row = int(math.floor(ax)), int(math.floor(ay))
    end_col, end_row = int(math.floor(bx)), int(math.floor(by))
    dx, dy = bx - ax, by - ay
    step_c = 1 if dx > 0 else -1
    step_r = 1 if dy > 0 else -1
    t_max_x = math.inf if dx == 0 else ((col + (step_c > 0)) - ax) / dx
    t_max_y = math.inf if dy == 0 else ((row + (step_r > 0)) - ay) / dy
    t_dx = math.inf if dx == 0 else abs(1.0 / dx)
    t_dy = math.inf if dy == 0 else abs(1.0 / dy)

    visit((row, col))
    guard = 4 * (grid.width + grid.height) + 8
    while (col, row) != (end_col, end_row) and guard:
        guard -= 1
        if abs(t_max_x - t_max_y) < 1e-12:
            # exact corner: include both side cells before stepping through
            visit((row, col + step_c))
            visit((row + step_r, col))
            col += step_c
            row += step_r
            t_max_x += t_dx
            t_max_y += t_dy
        elif t_max_x < t_max_y:
            col += step_c
            t_max_x += t_dx
        else:
            row += step_r
            t_max_y += t_dy
        visit((row, col))
    return cells


def segment_known_free(grid: OccupancyGrid, a: Point, b: Point, allow: Cell | None = None) -> bool:
    """True if every cell touched by segment a->b is in-bounds and known free."""
    for cell in raycast_cells(grid, a, b):
        if cell == allow:
            continue
        if not grid.in_bounds(cell) or grid.occupied(cell):
            return False
    return True


def unsafe_check(true_map: OccupancyGrid, pose: Pose) -> bool:
    """True when the pose sits in an occupied (or out-of-bounds) cell."""
    cell = true_map.cell_of(pose.point)
    if not true_map.in_bounds(cell):
        return True
    return true_map.occupied(cell)


class UnsafeMonitor:
    """Edge-triggered unsafe-zone detector: reports only free->unsafe transitions."""

    def __init__(self, true_map: OccupancyGrid):
        self._map = true_map
        self._inside = False

    def update(self, pose: Pose) -> str | None:
        """Return a detail string on a new unsafe entry, else None."""
        cell = self._map.cell_of(pose.point)
        if not self._map.in_bounds(cell):
            unsafe, detail = True, "out-of-bounds"
        else:
            unsafe, detail = self._map.occupied(cell), f"cell={cell[0]},{cell[1]}"
        entered = unsafe and not self._inside
        self._inside = unsafe
        return detail if entered else None


def connected(grid: OccupancyGrid, start_cell: Cell, goal_cell: Cell) -> bool:
    """Whether a planner-traversable route exists between two free cells."""
    if grid.occupied(start_cell) or grid.occupied(goal_cell):
        return False
    frontier = [start_cell]
    seen = {start_cell}
    while frontier:
        cell = frontier.pop()
        if cell == goal_cell:
            return True
        for nxt, _ in neighbors(grid, cell):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return False


def _box_blur(field: np.ndarray, radius: int) -> np.ndarray:
    if radius <= 0:
        return field
    kernel = 2 * radius + 1
    padded = np.pad(field, radius, mode="edge")
    csum = np.cumsum(np.cumsum(padded, axis=0), axis=1)
    csum = np.pad(csum, ((1, 0), (1, 0)))
    h, w = field.shape
    total = (
        csum[kernel : kernel + h, kernel : kernel + w]
        - csum[:h, kernel : kernel + w]
        - csum[kernel : kernel + h, :w]
        + csum[:h, :w]
    )
    return total / (kernel * kernel)


MAX_MAP_RETRIES = 64


def generate_debris_map(
    width: int,
    height: int,
    cell_size: float,
    occupancy_fraction: float,
    cluster_scale: int,
    seed: int,
    start_cell: Cell | None = None,
    goal_cell: Cell | None = None,
) -> OccupancyGrid:
    """Seeded clustered debris field with a guaranteed start-goal route.

    Thresholds smoothed noise at the requested occupancy quantile, forces the
    start and goal cells (and their immediate neighborhoods) free, and
    regenerates with an incremented sub-seed until the two are connected for
    the planner. Deterministic for a given argument tuple.
    """
    if not 0.0 <= occupancy_fraction <= 0.6:
        raise ValueError("occupancy_fraction must be in [0, 0.6]")
    start_cell = start_cell or (1, 1)
    goal_cell = goal_cell or (height - 2, width - 2)

    for attempt in range(MAX_MAP_RETRIES):
        rng = np.random.default_rng((seed, attempt))
        noise = rng.random((height, width))
        smooth = _box_blur(_box_blur(noise, cluster_scale), max(1, cluster_scale // 2))
        threshold = np.quantile(smooth, 1.0 - occupancy_fraction)
        cells = smooth > threshold
        for anchor in (start_cell, goal_cell):
            r0, c0 = anchor
            cells[max(0, r0 - 1) : r0 + 2, max(0, c0 - 1) : c0 + 2] = False
        grid = OccupancyGrid(cells=cells, cell_size=cell_size)
        if occupancy_fraction == 0.0 or connected(grid, start_cell, goal_cell):
            return grid
    raise RuntimeError(f"no connected map found within {MAX_MAP_RETRIES} attempts")
