"""Per-robot agents: pull jobs from the coordination server, run task state
machines (plan body pose, navigate, manipulate, report), post robot state at
a fixed rate, and synchronize multi-robot tasks through relayed messages.

Tasks are written as generators that yield wait predicates; the simulation
loop advances every agent once per tick, so agent behavior is deterministic
for a fixed tick order. Agents never share memory: coordination flows through
the server client, physical effects through the world they are embodied in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import world as sim_world
from .planner import (
    CIRCLE_RADIUS,
    BodyPose,
    PlannerError,
    RobotCuboid,
    grid_to_pgm,
    plan_path,
    project_occupancy,
    sample_circle_candidates,
    select_body_pose,
)
from .scenegraph import (
    PrimitiveKind,
    SceneGraph,
    SceneGraphError,
    SemanticClass,
    load_json,
)
from .server.core import NotFound, Rejected
from .world import RobotStatus, WorldError, WorldState

POLL_PERIOD = 0.1        # job/change polling, 10 Hz
STATE_POST_PERIOD = 0.1
SYNC_TIMEOUT = 60.0      # seconds of sim time for any synchronization wait

# Container classes paired with the primitive kind that actuates them.
_CONTAINER_PRIMITIVE = {
    SemanticClass.DRAWER: PrimitiveKind.TRANSLATION,
    SemanticClass.SWING_DOOR: PrimitiveKind.ROTATION,
}


class TaskFailed(Exception):
    pass


@dataclass
class AgentConfig:
    name: str
    has_arm: bool = False
    has_basket: bool = False
    state_post_period: float = STATE_POST_PERIOD
    poll_period: float = POLL_PERIOD
    sync_timeout: float = SYNC_TIMEOUT
    candidate_count: int = 36
    resolution: float = 0.05
    auto_close_after_search: bool = False
    dump_grid_dir: str | None = None
    fault_nav_failure: bool = False  # test hook: navigation never starts

    def __post_init__(self):
        if self.state_post_period <= 0:
            raise ValueError("state_post_period must be positive")


@dataclass
class TaskExecution:
    job_id: int
    phase: str  # planning | navigating | manipulating | reporting | syncing
    started_at: float


class RobotAgent:
    def __init__(self, config: AgentConfig, client, world: WorldState, peer: str | None = None, log=None):
        self.config = config
        self.name = config.name
        self.client = client
        self.world = world
        self.peer = peer
        self._log_cb = log
        self.now = 0.0
        self.execution: TaskExecution | None = None
        self._job: dict | None = None
        self._gen = None
        self._wait = None
        self._result: str | None = None
        self._messages: list[dict] = []
        self._inbox_cursor = 0
        self._post_idx = 0
        self._poll_idx = 0
        self._inbox_idx = 0
        self._peer_extents: tuple[float, float] | None = None
        self._dump_idx = 0

    # -- tick loop -----------------------------------------------------------

    def tick(self, now: float) -> None:
        self.now = now
        if self._gen is not None and self._due("_inbox_idx", self.config.poll_period):
            self._fetch_inbox()
        if self._gen is None and self._due("_poll_idx", self.config.poll_period):
            job = self.client.next_job(self.name)
            if job is not None:
                self._start_job(job)
        if self._gen is not None:
            self._advance()
        if self._due("_post_idx", self.config.state_post_period):
            self._post_state()

    def _due(self, counter: str, period: float) -> bool:
        idx = getattr(self, counter)
        if self.now + 1e-9 >= round(idx * period, 9):
            setattr(self, counter, idx + 1)
            return True
        return False

    def _log(self, event: str, **data) -> None:
        if self._log_cb:
            self._log_cb({"event": event, "agent": self.name, **data})

    def _body(self):
        return self.world.robot(self.name)

    def _post_state(self) -> None:
        body = self._body()
        self.client.post_state(
            self.name,
            battery=body.battery,
            position=body.position,
            heading=body.heading,
            status=body.status.value,
            timestamp=self.now,
        )
        self._log(
            "robot_state",
            battery=round(body.battery, 6),
            position=[round(body.position[0], 6), round(body.position[1], 6)],
            heading=round(body.heading, 6),
            status=body.status.value,
        )

    def _fetch_inbox(self) -> None:
        entries = self.client.get_inbox(self.name, since=self._inbox_cursor)
        for entry in entries:
            self._inbox_cursor = entry["seq"]
            msg = dict(entry["message"])
            msg["_from"] = entry["from"]
            self._messages.append(msg)

    # -- job lifecycle ---------------------------------------------------------

    def _start_job(self, job: dict) -> None:
        self._job = job
        self._result = None
        self.execution = TaskExecution(job_id=job["id"], phase="planning", started_at=self.now)
        self._log(
            "job_status",
            job_id=job["id"],
            task_id=job["task_id"],
            action=job["action"],
            role=job["role"],
            target=job["target_object"],
            status="assigned",
        )
        required_arm = job["action"] in ("open", "close", "toggle_switch", "grasp") or job["role"] == "arm"
        if required_arm and not self.config.has_arm:
            # Routing should make this unreachable; guard anyway.
            self.client.update_job(self.name, job["id"], "running")
            self._log("job_status", job_id=job["id"], status="running")
            self._fail_job("requires arm")
            return
        sim_world.set_status(self.world, self.name, RobotStatus.BUSY)
        self.client.update_job(self.name, job["id"], "running")
        self._log("job_status", job_id=job["id"], status="running")
        self._gen = self._task_for(job)
        self._wait = None

    def _advance(self) -> None:
        while self._gen is not None:
            if self._wait is not None:
                if not self._wait():
                    return
                self._wait = None
            try:
                self._wait = next(self._gen)
            except StopIteration:
                self._complete_job(self._result or "ok")
                return
            except TaskFailed as err:
                self._fail_job(str(err))
                return
            except (PlannerError, WorldError, SceneGraphError, Rejected, NotFound) as err:
                self._fail_job(str(err))
                return
            if self._wait is not None:
                return

    def _complete_job(self, result: str) -> None:
        job = self._job
        self._teardown()
        self.client.update_job(self.name, job["id"], "done", result)
        self._log("job_status", job_id=job["id"], status="done", result=result)

    def _fail_job(self, reason: str) -> None:
        job = self._job
        if job["role"] in ("arm", "support", "observer") and self.peer:
            try:
                self._send(self.peer, {"type": "abort", "task_id": job["task_id"], "outcome": "failure", "reason": reason})
            except (Rejected, NotFound):
                pass
        self._teardown()
        self.client.update_job(self.name, job["id"], "failed", reason)
        self._log("job_status", job_id=job["id"], status="failed", result=reason)

    def _teardown(self) -> None:
        task_id = self._job["task_id"] if self._job else None
        body = self._body()
        body.path = []
        body.goal_heading = None
        if body.crouched:
            sim_world.set_crouched(self.world, self.name, False)
        sim_world.set_status(self.world, self.name, RobotStatus.IDLE)
        self._gen = None
        self._wait = None
        self._job = None
        self.execution = None
        self._messages = [m for m in self._messages if m.get("task_id") != task_id]

    def _set_phase(self, phase: str) -> None:
        if self.execution is not None and self.execution.phase != phase:
            self.execution.phase = phase
            self._log("phase", job_id=self.execution.job_id, phase=phase)

    # -- shared building blocks -------------------------------------------------

    def _scene(self) -> SceneGraph:
        return load_json(self.client.get_scene())

    def _inflate(self) -> float:
        return math.hypot(*self._body().half_extents)

    def _peer_cuboid(self) -> RobotCuboid | None:
        if not self.peer:
            return None
        state = self.client.get_state(self.peer)
        if state is None:
            return None
        if self._peer_extents is None:
            for info in self.client.list_robots():
                if info["name"] == self.peer:
                    self._peer_extents = (info["half_extents"][0], info["half_extents"][1])
        extents = self._peer_extents or (0.35, 0.25)
        return RobotCuboid(
            center=(state["position"][0], state["position"][1]),
            half_extents=extents,
            heading=state["heading"],
        )

    def _build_grid(self, scene: SceneGraph, exclude_node: int | None, include_peer: bool):
        points = []
        for node_id in sorted(scene.nodes):
            if node_id == exclude_node:
                continue
            points.append(np.asarray(scene.nodes[node_id].points, dtype=float)[:, :3])
        if not points:
            raise PlannerError("empty map")
        obstacles = []
        if include_peer:
            cuboid = self._peer_cuboid()
            if cuboid is not None:
                obstacles.append(cuboid)
        return project_occupancy(
            np.vstack(points), self.world.floor_z_max, obstacles, self.config.resolution
        )

    def _plan_pose(self, scene: SceneGraph, object_xy, exclude_node: int | None, include_peer: bool = True):
        self._set_phase("planning")
        grid = self._build_grid(scene, exclude_node, include_peer)
        candidates = sample_circle_candidates(object_xy, CIRCLE_RADIUS, self.config.candidate_count)
        pose = select_body_pose(candidates, self._body().position, object_xy, grid)
        self._log(
            "body_pose",
            job_id=self.execution.job_id,
            position=[round(pose.position[0], 6), round(pose.position[1], 6)],
            heading=round(pose.heading, 6),
        )
        self._dump_grid(grid, pose, object_xy)
        return pose, grid

    def _dump_grid(self, grid, pose: BodyPose, object_xy) -> None:
        if not self.config.dump_grid_dir:
            return
        marks = [((float(object_xy[0]), float(object_xy[1])), 64), (pose.position, 128)]
        out = Path(self.config.dump_grid_dir)
        out.mkdir(parents=True, exist_ok=True)
        name = f"{self.name}_job{self.execution.job_id}_{self._dump_idx}.pgm"
        (out / name).write_bytes(grid_to_pgm(grid, marks))
        self._dump_idx += 1

    def _navigate(self, grid, pose: BodyPose):
        self._set_phase("navigating")
        if self.config.fault_nav_failure:
            deadline = self.now + self.config.sync_timeout
            yield lambda: self.now + 1e-9 >= deadline
            raise TaskFailed("navigation timeout")
        body = self._body()
        path = plan_path(grid, body.position, pose.position, inflate=self._inflate())
        sim_world.set_path(self.world, self.name, path, goal_heading=pose.heading)
        deadline = self.now + self.config.sync_timeout
        yield lambda: (not self._body().path) or self.now + 1e-9 >= deadline
        if self._body().path:
            raise TaskFailed("navigation timeout")

    def _goto_object(self, scene: SceneGraph, object_xy, exclude_node: int | None, include_peer: bool = True):
        pose, grid = self._plan_pose(scene, object_xy, exclude_node, include_peer)
        yield from self._navigate(grid, pose)
        return pose

    def _send(self, to: str, message: dict) -> None:
        self.client.relay(self.name, to, message, timestamp=self.now)
        self._log("relay", to=to, type=message.get("type"), task_id=message.get("task_id"))

    def _take_message(self, types: tuple[str, ...], task_id: int) -> dict | None:
        for i, msg in enumerate(self._messages):
            if msg.get("task_id") == task_id and msg.get("type") in types:
                return self._messages.pop(i)
        return None

    def _wait_message(self, types: tuple[str, ...], task_id: int):
        """Block until one of the message types arrives or the sync timeout hits."""
        self._set_phase("syncing")
        deadline = self.now + self.config.sync_timeout
        yield lambda: (
            any(m.get("task_id") == task_id and m.get("type") in types for m in self._messages)
            or self.now + 1e-9 >= deadline
        )
        msg = self._take_message(types, task_id)
        if msg is None:
            raise TaskFailed("sync timeout")
        return msg

    def _post_change(self, object_id: int, state: int) -> None:
        self._set_phase("reporting")
        seq = self.client.post_change(self.name, object_id, state, timestamp=self.now)
        self._log("object_change", server=self.name, object_id=object_id, state=state, seq=seq)

    def _post_link(self, from_id: int, to_id: int) -> None:
        seq = self.client.post_link(self.name, from_id, to_id, timestamp=self.now)
        self._log("link", server=self.name, from_id=from_id, to_id=to_id, seq=seq)

    def _container_primitive(self, scene: SceneGraph, node_id: int):
        node = scene.node(node_id)
        kind = _CONTAINER_PRIMITIVE.get(node.semantic_class)
        if kind is None:
            raise TaskFailed("object is not a container")
        for prim in node.primitives:
            if prim.kind == kind:
                return prim
        raise TaskFailed("no motion primitive")

    # -- task state machines ------------------------------------------------------

    def _task_for(self, job: dict):
        action, role = job["action"], job["role"]
        if action in ("open", "close"):
            return self._task_open_close(job, open_it=(action == "open"))
        if action == "toggle_switch":
            return self._task_toggle_switch(job)
        if action == "grasp":
            return self._task_grasp(job)
        if action == "state_check":
            return self._task_state_check(job)
        if action in ("fetch_and_drop", "search_and_drop"):
            if role == "arm":
                if action == "fetch_and_drop":
                    return self._task_fetch_arm(job)
                return self._task_search_arm(job)
            return self._task_handover_support(job)
        if action == "operate_and_check":
            if role == "arm":
                return self._task_operate_arm(job)
            return self._task_operate_observer(job)
        raise TaskFailed(f"unknown action {action}")

    def _task_open_close(self, job: dict, open_it: bool):
        scene = self._scene()
        target = job["target_object"]
        prim = self._container_primitive(scene, target)
        yield from self._goto_object(scene, (prim.origin[0], prim.origin[1]), exclude_node=target)
        self._set_phase("manipulating")
        outcome = sim_world.execute_primitive(
            self.world, self.name, target, prim, target_state=0 if open_it else 1
        )
        self._post_change(target, outcome.new_state)
        self._result = "open" if open_it else "closed"

    def _task_toggle_switch(self, job: dict):
        scene = self._scene()
        target = job["target_object"]
        prim = next((p for p in scene.node(target).primitives if p.kind == PrimitiveKind.PRESS), None)
        if prim is None:
            raise TaskFailed("no motion primitive")
        yield from self._goto_object(scene, (prim.origin[0], prim.origin[1]), exclude_node=target)
        self._set_phase("manipulating")
        sim_world.execute_primitive(self.world, self.name, target, prim)
        self._result = "pressed"

    def _task_grasp(self, job: dict):
        scene = self._scene()
        target = job["target_object"]
        cent = scene.node(target).centroid()
        yield from self._goto_object(scene, (float(cent[0]), float(cent[1])), exclude_node=target)
        self._set_phase("manipulating")
        sim_world.grasp(self.world, self.name, target)
        self._result = f"holding {target}"

    def _task_state_check(self, job: dict):
        scene = self._scene()
        target = job["target_object"]
        cent = scene.node(target).centroid()
        yield from self._goto_object(scene, (float(cent[0]), float(cent[1])), exclude_node=target)
        self._set_phase("manipulating")
        observed = sim_world.observe_lamp_state(self.world, self.name, target)
        self._post_change(target, observed)
        self._result = "on" if observed == 1 else "off"

    # Fetch & Drop, arm side: grasp, then hand the item over the crouch handshake.
    def _task_fetch_arm(self, job: dict):
        scene = self._scene()
        target = job["target_object"]
        cent = scene.node(target).centroid()
        yield from self._goto_object(scene, (float(cent[0]), float(cent[1])), exclude_node=target)
        self._set_phase("manipulating")
        sim_world.grasp(self.world, self.name, target)
        yield from self._handover(job)
        self._result = "delivered"

    def _handover(self, job: dict):
        """Arm-side rendezvous: announce pose, wait for the crouch, then drop."""
        task_id = job["task_id"]
        body = self._body()
        self._set_phase("syncing")
        self._send(
            self.peer,
            {
                "type": "rendezvous_request",
                "task_id": task_id,
                "pose": [body.position[0], body.position[1]],
            },
        )
        msg = yield from self._wait_message(("crouch_ready", "abort"), task_id)
        if msg["type"] == "abort":
            raise TaskFailed("peer aborted")
        self._set_phase("manipulating")
        sim_world.drop_into_basket(self.world, self.name, self.peer)
        self._send(self.peer, {"type": "drop_done", "task_id": task_id})

    # Support side of both handover tasks: come close, crouch, signal ready.
    def _task_handover_support(self, job: dict):
        task_id = job["task_id"]
        msg = yield from self._wait_message(("rendezvous_request", "abort"), task_id)
        if msg["type"] == "abort":
            if msg.get("outcome") == "not_found":
                self._result = "not found"
                return
            raise TaskFailed("peer aborted")
        scene = self._scene()
        arm_xy = (msg["pose"][0], msg["pose"][1])
        # The peer is the rendezvous target, so its cuboid is excluded here.
        yield from self._goto_object(scene, arm_xy, exclude_node=None, include_peer=False)
        sim_world.set_crouched(self.world, self.name, True)
        self._send(self.peer, {"type": "crouch_ready", "task_id": task_id})
        msg = yield from self._wait_message(("drop_done", "abort"), task_id)
        sim_world.set_crouched(self.world, self.name, False)
        if msg["type"] == "abort":
            if msg.get("outcome") == "not_found":
                self._result = "not found"
                return
            raise TaskFailed("peer aborted")
        self._result = "received"

    # Search & Drop, arm side: open the container, look inside, fetch on a hit.
    def _task_search_arm(self, job: dict):
        scene = self._scene()
        target = job["target_object"]
        query = job["params"].get("query_label", "")
        prim = self._container_primitive(scene, target)
        yield from self._goto_object(scene, (prim.origin[0], prim.origin[1]), exclude_node=target)
        self._set_phase("manipulating")
        outcome = sim_world.execute_primitive(self.world, self.name, target, prim, target_state=0)
        self._post_change(target, outcome.new_state)
        found = sim_world.detect_contents(self.world, target, query)
        self._log("detection", job_id=job["id"], container=target, query=query, found=found)
        if found is None:
            self._set_phase("manipulating")
            outcome = sim_world.execute_primitive(self.world, self.name, target, prim, target_state=1)
            self._post_change(target, outcome.new_state)
            self._send(
                self.peer,
                {"type": "abort", "task_id": job["task_id"], "outcome": "not_found"},
            )
            self._result = "not found"
            return
        cent = scene.node(target).centroid()
        yield from self._goto_object(scene, (float(cent[0]), float(cent[1])), exclude_node=target)
        self._set_phase("manipulating")
        sim_world.grasp(self.world, self.name, found)
        yield from self._handover(job)
        if self.config.auto_close_after_search:
            yield from self._goto_object(scene, (prim.origin[0], prim.origin[1]), exclude_node=target)
            self._set_phase("manipulating")
            outcome = sim_world.execute_primitive(self.world, self.name, target, prim, target_state=1)
            self._post_change(target, outcome.new_state)
        self._result = "delivered"

    # Operate & Check, arm side: press once the observer has its baseline.
    def _task_operate_arm(self, job: dict):
        scene = self._scene()
        target = job["target_object"]
        prim = next((p for p in scene.node(target).primitives if p.kind == PrimitiveKind.PRESS), None)
        if prim is None:
            raise TaskFailed("no motion primitive")
        yield from self._goto_object(scene, (prim.origin[0], prim.origin[1]), exclude_node=target)
        msg = yield from self._wait_message(("observer_ready", "abort"), job["task_id"])
        if msg["type"] == "abort":
            raise TaskFailed("peer aborted")
        self._set_phase("manipulating")
        sim_world.execute_primitive(self.world, self.name, target, prim)
        self._send(self.peer, {"type": "switch_toggled", "task_id": job["task_id"]})
        self._result = "pressed"

    # Operate & Check, observer side: baseline every lamp, wait for the press,
    # re-observe, then report new links and lamp states.
    def _task_operate_observer(self, job: dict):
        scene = self._scene()
        switch = job["target_object"]
        lamps = [n.id for n in scene.nodes_of_class(SemanticClass.LAMP)]
        pre: dict[int, int] = {}
        unchecked: list[int] = []
        for lamp_id in lamps:
            cent = scene.node(lamp_id).centroid()
            try:
                pose, grid = self._plan_pose(scene, (float(cent[0]), float(cent[1])), exclude_node=lamp_id)
            except PlannerError:
                unchecked.append(lamp_id)
                continue
            yield from self._navigate(grid, pose)
            pre[lamp_id] = sim_world.observe_lamp_state(self.world, self.name, lamp_id)
        self._send(self.peer, {"type": "observer_ready", "task_id": job["task_id"]})
        msg = yield from self._wait_message(("switch_toggled", "abort"), job["task_id"])
        if msg["type"] == "abort":
            raise TaskFailed("peer aborted")
        changed: list[int] = []
        for lamp_id in sorted(pre):
            cent = scene.node(lamp_id).centroid()
            try:
                pose, grid = self._plan_pose(scene, (float(cent[0]), float(cent[1])), exclude_node=lamp_id)
            except PlannerError:
                unchecked.append(lamp_id)
                continue
            yield from self._navigate(grid, pose)
            after = sim_world.observe_lamp_state(self.world, self.name, lamp_id)
            if after != pre[lamp_id]:
                changed.append(lamp_id)
                self._post_link(switch, lamp_id)
                self._post_change(lamp_id, after)
        if changed:
            self._result = "linked " + ",".join(str(i) for i in sorted(changed))
        else:
            self._result = "no connections found"
        if unchecked:
            self._result += "; unchecked " + ",".join(str(i) for i in sorted(set(unchecked)))
