"""Body planning on a 2D occupancy grid projected from the 3D scene.

The workflow: project scene points (floor excluded) plus peer-robot cuboids
into a boolean grid, sample candidate standing positions on a circle around
the target, then pick the closest candidate with enough clearance. Navigation
uses an 8-connected shortest path over the obstacle-inflated grid.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

CIRCLE_RADIUS = 1.0       # standing circle around the target, meters
MIN_CLEARANCE = 0.6       # required distance to obstacles, meters
DEFAULT_CANDIDATES = 36   # 10 degree spacing
DEFAULT_RESOLUTION = 0.05

# Diagonal-inclusive neighborhood: (dcol, drow, step cost in cells)
_NEIGHBORS = [
    (1, 0, 1.0), (-1, 0, 1.0), (0, 1, 1.0), (0, -1, 1.0),
    (1, 1, math.sqrt(2)), (1, -1, math.sqrt(2)),
    (-1, 1, math.sqrt(2)), (-1, -1, math.sqrt(2)),
]


class PlannerError(Exception):
    pass


@dataclass(frozen=True)
class RobotCuboid:
    """Upper bound of a robot's footprint: rotated rectangle in the plane."""

    center: tuple[float, float]
    half_extents: tuple[float, float]
    heading: float = 0.0

    def __post_init__(self):
        if self.half_extents[0] <= 0 or self.half_extents[1] <= 0:
            raise PlannerError("cuboid half extents must be positive")

    @property
    def circumradius(self) -> float:
        return math.hypot(*self.half_extents)

    def contains(self, xy: np.ndarray) -> np.ndarray:
        """Vectorized membership test for an (N, 2) array of points."""
        d = np.atleast_2d(xy) - np.asarray(self.center)
        c, s = math.cos(-self.heading), math.sin(-self.heading)
        local_x = d[:, 0] * c - d[:, 1] * s
        local_y = d[:, 0] * s + d[:, 1] * c
        hx, hy = self.half_extents
        return (np.abs(local_x) <= hx) & (np.abs(local_y) <= hy)


@dataclass(frozen=True)
class BodyPose:
    position: tuple[float, float]
    heading: float  # normalized to [0, 2*pi)


def normalize_angle(theta: float) -> float:
    return theta % (2.0 * math.pi)


@dataclass
class OccupancyGrid:
    """Boolean raster of obstructed space. cells[row, col], row-major, row = y."""

    resolution: float
    origin: tuple[float, float]  # world coords of the (0, 0) cell corner
    cells: np.ndarray            # bool, shape (height, width)

    def __post_init__(self):
        if self.resolution <= 0:
            raise PlannerError("resolution must be positive")
        self.cells = np.asarray(self.cells, dtype=bool)

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    def cell_of(self, xy) -> tuple[int, int]:
        col = int(math.floor((xy[0] - self.origin[0]) / self.resolution))
        row = int(math.floor((xy[1] - self.origin[1]) / self.resolution))
        return col, row

    def in_bounds(self, xy) -> bool:
        col, row = self.cell_of(xy)
        return 0 <= col < self.width and 0 <= row < self.height

    def cell_center(self, col: int, row: int) -> tuple[float, float]:
        return (
            self.origin[0] + (col + 0.5) * self.resolution,
            self.origin[1] + (row + 0.5) * self.resolution,
        )

    def occupied_centers(self) -> np.ndarray:
        """(N, 2) world coordinates of all occupied cell centers."""
        rows, cols = np.nonzero(self.cells)
        centers = np.empty((len(rows), 2))
        centers[:, 0] = self.origin[0] + (cols + 0.5) * self.resolution
        centers[:, 1] = self.origin[1] + (rows + 0.5) * self.resolution
        return centers


def project_occupancy(
    points: np.ndarray,
    floor_z_max: float,
    obstacles: list[RobotCuboid] | None = None,
    resolution: float = DEFAULT_RESOLUTION,
) -> OccupancyGrid:
    """Project 3D points onto the xy-plane, excluding the floor slab.

    A cell is occupied iff it contains at least one point with z > floor_z_max
    or its center falls inside an obstacle cuboid. Bounds cover every input
    point plus a one-cell margin on each side.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] < 3:
        raise PlannerError("empty map")
    if resolution <= 0:
        raise PlannerError("resolution must be positive")
    xy = pts[:, :2]
    origin = (float(xy[:, 0].min() - resolution), float(xy[:, 1].min() - resolution))
    width = int(math.floor((xy[:, 0].max() - origin[0]) / resolution)) + 2
    height = int(math.floor((xy[:, 1].max() - origin[1]) / resolution)) + 2
    cells = np.zeros((height, width), dtype=bool)

    above = pts[pts[:, 2] > floor_z_max]
    if len(above):
        cols = np.floor((above[:, 0] - origin[0]) / resolution).astype(int)
        rows = np.floor((above[:, 1] - origin[1]) / resolution).astype(int)
        cells[rows, cols] = True

    grid = OccupancyGrid(resolution=resolution, origin=origin, cells=cells)
    for cuboid in obstacles or []:
        _rasterize_cuboid(grid, cuboid)
    return grid


def _rasterize_cuboid(grid: OccupancyGrid, cuboid: RobotCuboid) -> None:
    r = cuboid.circumradius
    col0, row0 = grid.cell_of((cuboid.center[0] - r, cuboid.center[1] - r))
    col1, row1 = grid.cell_of((cuboid.center[0] + r, cuboid.center[1] + r))
    col0, row0 = max(col0, 0), max(row0, 0)
    col1, row1 = min(col1, grid.width - 1), min(row1, grid.height - 1)
    if col0 > col1 or row0 > row1:
        return
    cols, rows = np.meshgrid(np.arange(col0, col1 + 1), np.arange(row0, row1 + 1))
    centers = np.stack(
        [
            grid.origin[0] + (cols.ravel() + 0.5) * grid.resolution,
            grid.origin[1] + (rows.ravel() + 0.5) * grid.resolution,
        ],
        axis=1,
    )
    inside = cuboid.contains(centers).reshape(rows.shape)
    grid.cells[row0 : row1 + 1, col0 : col1 + 1] |= inside


def sample_circle_candidates(
    object_xy, radius: float = CIRCLE_RADIUS, n: int = DEFAULT_CANDIDATES
) -> list[tuple[float, float]]:
    """n positions uniformly spaced by angle on a circle around the object."""
    if n < 4:
        raise PlannerError("need at least 4 candidates")
    if radius <= 0:
        raise PlannerError("radius must be positive")
    ox, oy = float(object_xy[0]), float(object_xy[1])
    out = []
    for k in range(n):
        angle = 2.0 * math.pi * k / n
        out.append((ox + radius * math.cos(angle), oy + radius * math.sin(angle)))
    return out


def clearance(grid: OccupancyGrid, p) -> float:
    """Euclidean distance from p to the nearest occupied cell center."""
    if not grid.in_bounds(p):
        raise PlannerError("out of bounds")
    centers = grid.occupied_centers()
    if len(centers) == 0:
        return math.inf
    d = centers - np.asarray([float(p[0]), float(p[1])])
    return float(np.sqrt((d * d).sum(axis=1)).min())


def select_body_pose(
    candidates,
    robot_xy,
    object_xy,
    grid: OccupancyGrid,
    min_clearance: float = MIN_CLEARANCE,
) -> BodyPose:
    """Nearest feasible candidate to the robot, facing the object.

    Feasible: inside the grid with clearance >= min_clearance. Distance ties
    resolve toward the lower candidate index.
    """
    if not len(candidates):
        raise PlannerError("no valid body pose")
    rx, ry = float(robot_xy[0]), float(robot_xy[1])
    centers = grid.occupied_centers()
    best = None
    best_d = math.inf
    for cand in candidates:
        cx, cy = float(cand[0]), float(cand[1])
        if not grid.in_bounds((cx, cy)):
            continue
        if len(centers):
            d = centers - np.asarray([cx, cy])
            if float(np.sqrt((d * d).sum(axis=1)).min()) < min_clearance:
                continue
        dist = math.hypot(cx - rx, cy - ry)
        if dist < best_d:
            best, best_d = (cx, cy), dist
    if best is None:
        raise PlannerError("no valid body pose")
    heading = normalize_angle(math.atan2(object_xy[1] - best[1], object_xy[0] - best[0]))
    return BodyPose(position=best, heading=heading)


def inflate_grid(grid: OccupancyGrid, inflate: float) -> np.ndarray:
    """Dilate occupied cells by a metric radius (center-to-center distance)."""
    if inflate <= 0:
        return grid.cells.copy()
    dist = ndimage.distance_transform_edt(
        ~grid.cells, sampling=(grid.resolution, grid.resolution)
    )
    return dist <= inflate


def plan_path(grid: OccupancyGrid, start, goal, inflate: float = 0.0) -> list[tuple[float, float]]:
    """8-connected shortest path from start to goal over the inflated grid.

    Waypoints are cell centers with straight runs collapsed; the exact start
    and goal positions replace the first and last waypoints.
    """
    cells = inflate_grid(grid, inflate)
    if not grid.in_bounds(start) or not grid.in_bounds(goal):
        raise PlannerError("no path")
    start_cell = grid.cell_of(start)
    goal_cell = grid.cell_of(goal)
    if cells[start_cell[1], start_cell[0]] or cells[goal_cell[1], goal_cell[0]]:
        raise PlannerError("no path")
    if start_cell == goal_cell:
        return [(float(start[0]), float(start[1])), (float(goal[0]), float(goal[1]))]

    cell_path = _astar(cells, start_cell, goal_cell)
    if cell_path is None:
        raise PlannerError("no path")

    waypoints = [grid.cell_center(c, r) for c, r in _compress(cell_path)]
    waypoints[0] = (float(start[0]), float(start[1]))
    waypoints[-1] = (float(goal[0]), float(goal[1]))
    return waypoints


def _astar(cells: np.ndarray, start: tuple[int, int], goal: tuple[int, int]):
    height, width = cells.shape

    def h(c):
        dx, dy = abs(c[0] - goal[0]), abs(c[1] - goal[1])
        return max(dx, dy) + (math.sqrt(2) - 1.0) * min(dx, dy)

    open_heap = [(h(start), 0.0, start)]
    g_score = {start: 0.0}
    came_from: dict[tuple[int, int], tuple[int, int]] = {}
    closed = set()
    while open_heap:
        _, g, current = heapq.heappop(open_heap)
        if current == goal:
            path = [current]
            while current in came_from:
                current = came_from[current]
                path.append(current)
            path.reverse()
            return path
        if current in closed:
            continue
        closed.add(current)
        for dc, dr, cost in _NEIGHBORS:
            nc, nr = current[0] + dc, current[1] + dr
            if not (0 <= nc < width and 0 <= nr < height) or cells[nr, nc]:
                continue
            tentative = g + cost
            neighbor = (nc, nr)
            if tentative < g_score.get(neighbor, math.inf):
                g_score[neighbor] = tentative
                came_from[neighbor] = current
                heapq.heappush(open_heap, (tentative + h(neighbor), tentative, neighbor))
    return None


def _compress(cell_path: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Keep only the turning points of a straight-run cell path."""
    if len(cell_path) <= 2:
        return cell_path
    out = [cell_path[0]]
    prev_step = None
    for a, b in zip(cell_path, cell_path[1:]):
        step = (b[0] - a[0], b[1] - a[1])
        if prev_step is not None and step != prev_step:
            out.append(a)
        prev_step = step
    out.append(cell_path[-1])
    return out


def grid_to_pgm(grid: OccupancyGrid, marks: list[tuple[tuple[float, float], int]] | None = None) -> bytes:
    """Render the grid as a binary PGM (P5), optionally marking world points.

    Rows are flipped so north is up. Free space is white, obstacles black.
    """
    img = np.where(grid.cells, 0, 255).astype(np.uint8)
    for xy, gray in marks or []:
        if grid.in_bounds(xy):
            col, row = grid.cell_of(xy)
            img[row, col] = gray
    header = f"P5\n{grid.width} {grid.height}\n255\n".encode("ascii")
    return header + img[::-1].tobytes()
