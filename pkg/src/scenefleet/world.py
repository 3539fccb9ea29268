"""Deterministic ground-truth world: object states, hidden wiring, drawer
contents, movable items, and robot bodies with simple kinematics.

The world is owned by a single simulation loop; agents reach it only through
that loop, so plain in-place mutation is safe. Perception is provided by
oracles (exact by default) standing in for camera/vision pipelines.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum

from .planner import RobotCuboid, normalize_angle
from .scenegraph import (
    MotionPrimitive,
    NodeState,
    PrimitiveKind,
    SceneGraph,
    SemanticClass,
    STATEFUL_CLASSES,
)

REACH_RADIUS = 1.1     # slightly above the 1.0 m planning circle
OBSERVE_RANGE = 5.0
DROP_RANGE = 1.5
DEFAULT_SPEED = 1.0    # m/s
DEFAULT_DRAIN = 0.01   # battery fraction per meter
DEFAULT_HALF_EXTENTS = (0.35, 0.25)


class WorldError(Exception):
    pass


class RobotStatus(str, Enum):
    IDLE = "IDLE"
    BUSY = "BUSY"


@dataclass(frozen=True)
class AtPose:
    xy: tuple[float, float]


@dataclass(frozen=True)
class InDrawer:
    drawer_id: int


@dataclass(frozen=True)
class InBasket:
    robot: str


@dataclass(frozen=True)
class InGripper:
    robot: str


ItemLocation = AtPose | InDrawer | InBasket | InGripper


@dataclass
class RobotBody:
    name: str
    position: tuple[float, float]
    heading: float = 0.0
    battery: float = 1.0
    status: RobotStatus = RobotStatus.IDLE
    has_arm: bool = False
    has_basket: bool = False
    basket: set[int] = field(default_factory=set)
    crouched: bool = False
    speed: float = DEFAULT_SPEED
    half_extents: tuple[float, float] = DEFAULT_HALF_EXTENTS
    gripper: int | None = None
    path: list[tuple[float, float]] = field(default_factory=list)
    goal_heading: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.battery <= 1.0:
            raise WorldError(f"robot {self.name}: battery outside [0,1]")
        self.heading = normalize_angle(self.heading)
        if self.basket and not self.has_basket:
            raise WorldError(f"robot {self.name}: basket items without a basket")

    def cuboid(self) -> RobotCuboid:
        return RobotCuboid(
            center=self.position, half_extents=self.half_extents, heading=self.heading
        )


@dataclass(frozen=True)
class PrimitiveOutcome:
    success: bool
    object_id: int
    new_state: int | None  # None for a press (the switch itself is stateless)


class WorldState:
    """Mutable ground truth plus the seeded RNG all stochastic oracles share."""

    def __init__(
        self,
        scene: SceneGraph,
        robots: list[RobotBody],
        seed: int = 0,
        truths: dict[int, int] | None = None,
        wiring: dict[int, set[int]] | None = None,
        items: dict[int, tuple[str, ItemLocation]] | None = None,
        drain_rate: float = DEFAULT_DRAIN,
        reach_radius: float = REACH_RADIUS,
        observe_range: float = OBSERVE_RANGE,
        error_rate: float = 0.0,
        floor_z_max: float = 0.05,
    ):
        self.time = 0.0
        self.seed = seed
        self.rng = random.Random(seed)
        self.classes = {n.id: n.semantic_class for n in scene.nodes.values()}
        self.object_xy = {
            n.id: (float(n.centroid()[0]), float(n.centroid()[1]))
            for n in scene.nodes.values()
        }
        # Truth defaults to the scene graph's believed states.
        self.object_truth: dict[int, int] = {}
        for node in scene.nodes.values():
            if node.semantic_class in STATEFUL_CLASSES:
                self.object_truth[node.id] = 0 if node.state == NodeState.ZERO else 1
        if truths:
            self.object_truth.update(truths)
        self.wiring: dict[int, set[int]] = {k: set(v) for k, v in (wiring or {}).items()}
        self.item_labels: dict[int, str] = {}
        self.item_location: dict[int, ItemLocation] = {}
        for item_id, (label, loc) in (items or {}).items():
            self.item_labels[item_id] = label
            self.item_location[item_id] = loc
        self.robots: dict[str, RobotBody] = {r.name: r for r in robots}
        self.drain_rate = drain_rate
        self.reach_radius = reach_radius
        self.observe_range = observe_range
        self.error_rate = error_rate
        self.floor_z_max = floor_z_max
        self.on_event = None  # callable(dict) installed by the simulation loop

    def _emit(self, event: str, **data):
        if self.on_event:
            self.on_event({"event": event, **data})

    def robot(self, name: str) -> RobotBody:
        try:
            return self.robots[name]
        except KeyError:
            raise WorldError(f"unknown robot {name}") from None

    def contents(self, drawer_id: int) -> list[tuple[str, int]]:
        """Items currently inside the given container, sorted by id."""
        found = [
            (self.item_labels[i], i)
            for i, loc in self.item_location.items()
            if isinstance(loc, InDrawer) and loc.drawer_id == drawer_id
        ]
        return sorted(found, key=lambda pair: pair[1])

    def item_xy(self, item_id: int) -> tuple[float, float]:
        loc = self.item_location[item_id]
        if isinstance(loc, AtPose):
            return loc.xy
        if isinstance(loc, InDrawer):
            return self.object_xy[loc.drawer_id]
        if isinstance(loc, (InBasket, InGripper)):
            return self.robot(loc.robot).position
        raise WorldError("unknown item location")


def step(world: WorldState, dt: float) -> WorldState:
    """Advance time: robots follow their active paths, batteries drain."""
    if dt <= 0:
        raise WorldError("dt must be positive")
    for name in sorted(world.robots):
        body = world.robots[name]
        if body.path:
            _advance(world, body, body.speed * dt)
    world.time += dt
    return world


def _advance(world: WorldState, body: RobotBody, budget: float) -> None:
    traveled = 0.0
    x, y = body.position
    while budget > 1e-12 and body.path:
        tx, ty = body.path[0]
        seg = math.hypot(tx - x, ty - y)
        if seg <= 1e-12:
            body.path.pop(0)
            continue
        body.heading = normalize_angle(math.atan2(ty - y, tx - x))
        if seg <= budget:
            x, y = tx, ty
            traveled += seg
            budget -= seg
            body.path.pop(0)
        else:
            frac = budget / seg
            x, y = x + (tx - x) * frac, y + (ty - y) * frac
            traveled += budget
            budget = 0.0
        body.position = (x, y)
    if not body.path and body.goal_heading is not None:
        body.heading = normalize_angle(body.goal_heading)
        body.goal_heading = None
    if traveled > 0:
        body.battery = max(0.0, body.battery - world.drain_rate * traveled)


def set_path(world: WorldState, robot: str, waypoints, goal_heading: float | None = None) -> None:
    body = world.robot(robot)
    body.path = [(float(x), float(y)) for x, y in waypoints]
    body.goal_heading = goal_heading


def set_status(world: WorldState, robot: str, status: RobotStatus) -> None:
    world.robot(robot).status = status


def set_crouched(world: WorldState, robot: str, crouched: bool) -> None:
    world.robot(robot).crouched = crouched
    world._emit("crouch", robot=robot, crouched=crouched)


def execute_primitive(
    world: WorldState,
    robot: str,
    object_id: int,
    primitive: MotionPrimitive,
    target_state: int | None = None,
) -> PrimitiveOutcome:
    """Actuate a motion primitive against the ground truth.

    Drawers/doors move to target_state; a press toggles every lamp wired to
    the switch. Requires the robot to be mid-job (BUSY) and within reach.
    """
    body = world.robot(robot)
    if body.status != RobotStatus.BUSY:
        raise WorldError("robot not busy")
    if primitive.kind in (PrimitiveKind.TRANSLATION, PrimitiveKind.ROTATION) and not body.has_arm:
        raise WorldError("requires arm")
    ox, oy = primitive.origin[0], primitive.origin[1]
    if math.hypot(body.position[0] - ox, body.position[1] - oy) > world.reach_radius:
        raise WorldError("not in reach")

    if primitive.kind == PrimitiveKind.PRESS:
        if world.classes.get(object_id) != SemanticClass.LIGHT_SWITCH:
            raise WorldError("press target is not a light switch")
        for lamp_id in sorted(world.wiring.get(object_id, ())):
            world.object_truth[lamp_id] ^= 1
        world._emit("primitive", robot=robot, object_id=object_id, kind="press")
        return PrimitiveOutcome(success=True, object_id=object_id, new_state=None)

    if object_id not in world.object_truth:
        raise WorldError("object has no state")
    if target_state not in (0, 1):
        raise WorldError("translation/rotation needs a target state")
    world.object_truth[object_id] = target_state
    world._emit(
        "primitive",
        robot=robot,
        object_id=object_id,
        kind=primitive.kind.value,
        new_state=target_state,
    )
    return PrimitiveOutcome(success=True, object_id=object_id, new_state=target_state)


def observe_lamp_state(
    world: WorldState, robot: str, lamp_id: int, error_rate: float | None = None
) -> int:
    """Report a lamp's truth state, flipped with probability error_rate."""
    if world.classes.get(lamp_id) != SemanticClass.LAMP:
        raise WorldError("not observable")
    body = world.robot(robot)
    lx, ly = world.object_xy[lamp_id]
    if math.hypot(body.position[0] - lx, body.position[1] - ly) > world.observe_range:
        raise WorldError("not in range")
    truth = world.object_truth[lamp_id]
    eps = world.error_rate if error_rate is None else error_rate
    observed = truth
    if eps > 0 and world.rng.random() < eps:
        observed = truth ^ 1
    if observed != truth:
        world._emit("observation_divergence", robot=robot, lamp_id=lamp_id, truth=truth, observed=observed)
    return observed


def detect_contents(world: WorldState, drawer_id: int, query_label: str) -> int | None:
    """Lowest-id item inside an open container whose label matches the query."""
    if world.object_truth.get(drawer_id) != 0:
        raise WorldError("cannot see inside closed drawer")
    query = query_label.lower()
    for label, item_id in world.contents(drawer_id):
        if label.lower() == query:
            return item_id
    return None


def grasp(world: WorldState, robot: str, movable_id: int) -> None:
    """Pick up a movable item into the robot's gripper."""
    body = world.robot(robot)
    if not body.has_arm:
        raise WorldError("requires arm")
    if movable_id not in world.item_location:
        raise WorldError("no such item")
    loc = world.item_location[movable_id]
    if isinstance(loc, InDrawer) and world.object_truth.get(loc.drawer_id) != 0:
        raise WorldError("drawer closed")
    if isinstance(loc, (InBasket, InGripper)):
        raise WorldError("item not graspable")
    ix, iy = world.item_xy(movable_id)
    if math.hypot(body.position[0] - ix, body.position[1] - iy) > world.reach_radius:
        raise WorldError("not in reach")
    if body.gripper is not None:
        raise WorldError("gripper occupied")
    world.item_location[movable_id] = InGripper(robot)
    body.gripper = movable_id
    world._emit("grasp", robot=robot, item_id=movable_id)


def drop_into_basket(world: WorldState, from_robot: str, to_robot: str) -> int:
    """Transfer the held item into the receiver's basket.

    The receiver must carry a basket and already be crouched; the crouch
    handshake exists to guarantee that precondition.
    """
    giver = world.robot(from_robot)
    receiver = world.robot(to_robot)
    if giver.gripper is None:
        raise WorldError("gripper empty")
    if not receiver.has_basket or not receiver.crouched:
        raise WorldError("receiver not ready")
    d = math.hypot(
        giver.position[0] - receiver.position[0], giver.position[1] - receiver.position[1]
    )
    if d > DROP_RANGE:
        raise WorldError("too far to drop")
    item_id = giver.gripper
    giver.gripper = None
    receiver.basket.add(item_id)
    world.item_location[item_id] = InBasket(to_robot)
    world._emit("drop", from_robot=from_robot, to_robot=to_robot, item_id=item_id)
    return item_id
