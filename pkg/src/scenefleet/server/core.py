"""Transport-agnostic coordination state: per-robot hubs with a state slot,
a sequence-numbered change feed, a FIFO job queue, and an inter-robot relay,
plus the shared authoritative scene-graph mirror.

The HTTP layer (api.py) and the in-process client (transport.py) both wrap
this class, so single-process and socket deployments share identical logic.
"""

from __future__ import annotations

import math
import threading
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from ..scenegraph import (
    ObjectChange,
    SceneGraph,
    SceneGraphError,
    SemanticClass,
    add_functional_link,
    apply_object_change,
    save_json,
)


class NotFound(Exception):
    pass


class Rejected(Exception):
    pass


class JobAction(str, Enum):
    OPEN = "open"
    CLOSE = "close"
    TOGGLE_SWITCH = "toggle_switch"
    GRASP = "grasp"
    STATE_CHECK = "state_check"
    FETCH_AND_DROP = "fetch_and_drop"
    SEARCH_AND_DROP = "search_and_drop"
    OPERATE_AND_CHECK = "operate_and_check"


class JobStatus(str, Enum):
    QUEUED = "queued"
    ASSIGNED = "assigned"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


TERMINAL = {JobStatus.DONE, JobStatus.FAILED}

_TRANSITIONS = {
    JobStatus.QUEUED: {JobStatus.ASSIGNED},
    JobStatus.ASSIGNED: {JobStatus.RUNNING},
    JobStatus.RUNNING: {JobStatus.DONE, JobStatus.FAILED},
}

# Actions whose execution needs a gripper; these always route to the arm robot.
GRIPPER_ACTIONS = {
    JobAction.OPEN,
    JobAction.CLOSE,
    JobAction.TOGGLE_SWITCH,
    JobAction.GRASP,
}

MULTI_ACTIONS = {
    JobAction.FETCH_AND_DROP,
    JobAction.SEARCH_AND_DROP,
    JobAction.OPERATE_AND_CHECK,
}

ACTION_CLASSES = {
    JobAction.OPEN: {SemanticClass.DRAWER, SemanticClass.SWING_DOOR},
    JobAction.CLOSE: {SemanticClass.DRAWER, SemanticClass.SWING_DOOR},
    JobAction.TOGGLE_SWITCH: {SemanticClass.LIGHT_SWITCH},
    JobAction.GRASP: {SemanticClass.MOVABLE},
    JobAction.STATE_CHECK: {SemanticClass.LAMP},
    JobAction.FETCH_AND_DROP: {SemanticClass.MOVABLE},
    JobAction.SEARCH_AND_DROP: {SemanticClass.DRAWER, SemanticClass.SWING_DOOR},
    JobAction.OPERATE_AND_CHECK: {SemanticClass.LIGHT_SWITCH},
}


@dataclass(frozen=True)
class RobotInfo:
    name: str
    has_arm: bool = False
    has_basket: bool = False
    half_extents: tuple[float, float] = (0.35, 0.25)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "has_arm": self.has_arm,
            "has_basket": self.has_basket,
            "half_extents": list(self.half_extents),
        }


@dataclass(frozen=True)
class RobotStateMsg:
    battery: float
    position: tuple[float, float]
    heading: float
    status: str  # IDLE | BUSY
    timestamp: float

    def __post_init__(self):
        if not 0.0 <= self.battery <= 1.0:
            raise Rejected("battery outside [0,1]")
        if not all(math.isfinite(v) for v in self.position):
            raise Rejected("position must be finite")
        if not 0.0 <= self.heading <= 2.0 * math.pi:
            raise Rejected("heading outside [0,2*pi]")
        if self.status not in ("IDLE", "BUSY"):
            raise Rejected("status must be IDLE or BUSY")

    def to_dict(self) -> dict:
        return {
            "battery": self.battery,
            "position": list(self.position),
            "heading": self.heading,
            "status": self.status,
            "timestamp": self.timestamp,
        }


@dataclass(frozen=True)
class FeedEntry:
    """One slot of a hub's append-only feed: a state change or a new link."""

    seq: int
    timestamp: float
    kind: str  # "state" | "link"
    object_id: int | None = None
    state: int | None = None
    from_id: int | None = None
    to_id: int | None = None

    def to_dict(self) -> dict:
        d = {"seq": self.seq, "timestamp": self.timestamp, "kind": self.kind}
        if self.kind == "state":
            d["object_id"] = self.object_id
            d["state"] = self.state
        else:
            d["from"] = self.from_id
            d["to"] = self.to_id
        return d


@dataclass
class Job:
    id: int
    task_id: int
    robot: str
    action: JobAction
    target_object: int
    role: str = "solo"  # solo | arm | support | observer
    params: dict = field(default_factory=dict)
    status: JobStatus = JobStatus.QUEUED
    result: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "task_id": self.task_id,
            "robot": self.robot,
            "action": self.action.value,
            "target_object": self.target_object,
            "role": self.role,
            "params": self.params,
            "status": self.status.value,
            "result": self.result,
        }


@dataclass(frozen=True)
class InboxEntry:
    seq: int
    timestamp: float
    sender: str
    message: dict

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "from": self.sender,
            "message": self.message,
        }


class _Hub:
    def __init__(self, info: RobotInfo):
        self.info = info
        self.latest_state: RobotStateMsg | None = None
        self.feed: list[FeedEntry] = []
        self.queue: deque[int] = deque()
        self.inbox: list[InboxEntry] = []


class CoordinationCore:
    """One process hosting every robot's logical server plus the scene mirror."""

    def __init__(self, scene: SceneGraph, robots: list[RobotInfo]):
        if not robots:
            raise Rejected("at least one robot required")
        self._lock = threading.RLock()
        self._scene = scene
        self._hubs = {info.name: _Hub(info) for info in robots}
        self._robot_order = [info.name for info in robots]
        self._jobs: dict[int, Job] = {}
        self._next_job_id = 1
        self._next_task_id = 1

    # -- robot registry -----------------------------------------------------

    def robots(self) -> list[RobotInfo]:
        return [self._hubs[n].info for n in self._robot_order]

    def _hub(self, name: str) -> _Hub:
        try:
            return self._hubs[name]
        except KeyError:
            raise NotFound(f"unknown robot {name}") from None

    def arm_robot(self) -> str:
        for name in self._robot_order:
            if self._hubs[name].info.has_arm:
                return name
        raise Rejected("no arm robot registered")

    def observer_robot(self) -> str:
        for name in self._robot_order:
            if not self._hubs[name].info.has_arm:
                return name
        return self.arm_robot()

    def support_robot(self) -> str:
        for name in self._robot_order:
            if self._hubs[name].info.has_basket:
                return name
        raise Rejected("no basket robot registered")

    # -- robot state --------------------------------------------------------

    def post_state(self, name: str, msg: RobotStateMsg) -> None:
        hub = self._hub(name)
        with self._lock:
            hub.latest_state = msg

    def get_state(self, name: str) -> RobotStateMsg | None:
        with self._lock:
            return self._hub(name).latest_state

    # -- change feed and scene mirror ----------------------------------------

    def post_change(self, name: str, object_id: int, state: int, timestamp: float) -> int:
        hub = self._hub(name)
        with self._lock:
            try:
                self._scene = apply_object_change(self._scene, ObjectChange(object_id, state))
            except SceneGraphError as err:
                if "no such object" in str(err):
                    raise NotFound(str(err)) from None
                raise Rejected(str(err)) from None
            entry = FeedEntry(
                seq=len(hub.feed) + 1,
                timestamp=timestamp,
                kind="state",
                object_id=object_id,
                state=state,
            )
            hub.feed.append(entry)
            return entry.seq

    def post_link(self, name: str, from_id: int, to_id: int, timestamp: float) -> int:
        hub = self._hub(name)
        with self._lock:
            try:
                self._scene = add_functional_link(self._scene, from_id, to_id)
            except SceneGraphError as err:
                if "no such object" in str(err):
                    raise NotFound(str(err)) from None
                raise Rejected(str(err)) from None
            entry = FeedEntry(
                seq=len(hub.feed) + 1,
                timestamp=timestamp,
                kind="link",
                from_id=from_id,
                to_id=to_id,
            )
            hub.feed.append(entry)
            return entry.seq

    def get_changes(self, name: str, since: int = 0) -> list[FeedEntry]:
        hub = self._hub(name)
        with self._lock:
            if since < 0:
                since = 0
            return hub.feed[since:]

    def scene_snapshot(self) -> SceneGraph:
        with self._lock:
            return self._scene

    def scene_json(self) -> bytes:
        with self._lock:
            return save_json(self._scene)

    # -- job queue ------------------------------------------------------------

    def enqueue(self, action: JobAction, target_object: int, params: dict | None = None) -> list[Job]:
        """Validate and route a command; multi-robot actions fan out to both queues."""
        params = dict(params or {})
        with self._lock:
            node = self._scene.nodes.get(target_object)
            if node is None:
                raise NotFound("no such object")
            if node.semantic_class not in ACTION_CLASSES[action]:
                raise Rejected("invalid action for object")
            if action in MULTI_ACTIONS:
                return self._enqueue_multi(action, target_object, params)
            if action in GRIPPER_ACTIONS:
                robot = self.arm_robot()
            else:
                robot = self.observer_robot()
            return [self._push_job(robot, action, target_object, "solo", params, self._take_task_id())]

    def _enqueue_multi(self, action: JobAction, target: int, params: dict) -> list[Job]:
        arm = self.arm_robot()
        partner = self.observer_robot() if action == JobAction.OPERATE_AND_CHECK else self.support_robot()
        if arm == partner:
            raise Rejected("agents not available")
        for name in (arm, partner):
            state = self._hubs[name].latest_state
            if state is not None and state.status == "BUSY":
                raise Rejected("agents not available")
        task_id = self._take_task_id()
        partner_role = "observer" if action == JobAction.OPERATE_AND_CHECK else "support"
        arm_job = self._push_job(arm, action, target, "arm", dict(params), task_id)
        partner_job = self._push_job(partner, action, target, partner_role, dict(params), task_id)
        return [arm_job, partner_job]

    def _take_task_id(self) -> int:
        task_id = self._next_task_id
        self._next_task_id += 1
        return task_id

    def _push_job(self, robot: str, action: JobAction, target: int, role: str, params: dict, task_id: int) -> Job:
        job = Job(
            id=self._next_job_id,
            task_id=task_id,
            robot=robot,
            action=action,
            target_object=target,
            role=role,
            params=params,
        )
        self._next_job_id += 1
        self._jobs[job.id] = job
        self._hubs[robot].queue.append(job.id)
        return job

    def next_job(self, name: str) -> Job | None:
        hub = self._hub(name)
        with self._lock:
            if not hub.queue:
                return None
            job = self._jobs[hub.queue.popleft()]
            job.status = JobStatus.ASSIGNED
            return job

    def update_job(self, job_id: int, status: JobStatus, result: str | None = None) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise NotFound("no such job")
            if status not in _TRANSITIONS.get(job.status, set()):
                raise Rejected(f"invalid transition {job.status.value} -> {status.value}")
            job.status = status
            if result is not None:
                job.result = result
            return job

    def get_job(self, job_id: int) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise NotFound("no such job")
            return job

    def list_jobs(self, name: str | None = None) -> list[Job]:
        with self._lock:
            jobs = sorted(self._jobs.values(), key=lambda j: j.id)
            if name is not None:
                self._hub(name)
                jobs = [j for j in jobs if j.robot == name]
            return jobs

    # -- inter-robot relay -----------------------------------------------------

    def relay(self, sender: str, recipient: str, message: dict, timestamp: float) -> int:
        self._hub(sender)
        hub = self._hub(recipient)
        with self._lock:
            entry = InboxEntry(
                seq=len(hub.inbox) + 1,
                timestamp=timestamp,
                sender=sender,
                message=dict(message),
            )
            hub.inbox.append(entry)
            return entry.seq

    def get_inbox(self, name: str, since: int = 0) -> list[InboxEntry]:
        hub = self._hub(name)
        with self._lock:
            if since < 0:
                since = 0
            return hub.inbox[since:]
