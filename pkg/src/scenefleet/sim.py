"""Scenario orchestration: a single control loop that dispatches scripted
jobs, ticks every agent in a fixed order, and steps the world clock.

All event-log timestamps are sim time, so two runs of the same scenario and
seed produce byte-identical logs regardless of the transport in use.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from . import world as sim_world
from .agents import RobotAgent
from .server.core import NotFound, Rejected
from .world import WorldState

DEFAULT_DT = 0.05


class EventLog:
    """Append-only JSON-lines event record with monotone sim timestamps."""

    def __init__(self):
        self.entries: list[dict] = []

    def add(self, t: float, event: dict) -> None:
        self.entries.append({"t": t, **event})

    def filter(self, event: str) -> list[dict]:
        return [e for e in self.entries if e.get("event") == event]

    def to_jsonl(self) -> bytes:
        lines = [json.dumps(e, sort_keys=True) for e in self.entries]
        return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""


@dataclass(frozen=True)
class ScriptEntry:
    at: float
    action: str
    target: int
    params: dict = field(default_factory=dict)
    via: str | None = None


class Simulation:
    def __init__(
        self,
        world: WorldState,
        client,
        agents: list[RobotAgent],
        script: list[ScriptEntry] | None = None,
        dt: float = DEFAULT_DT,
        log: EventLog | None = None,
    ):
        self.world = world
        self.client = client
        self.agents = agents
        self.script = sorted(script or [], key=lambda e: e.at)
        self.dt = dt
        self.log = log or EventLog()
        self.t = 0.0
        self.script_job_ids: list[int] = []
        self.rejected = 0
        world.on_event = lambda e: self.log.add(self.t, e)
        for agent in agents:
            agent._log_cb = lambda e: self.log.add(self.t, e)

    def run(self, duration: float, stop_when_idle: bool = False) -> "Simulation":
        pending = deque(self.script)
        tick = 0
        while True:
            t = round(tick * self.dt, 9)
            if t > duration + 1e-9:
                break
            self.t = t
            while pending and pending[0].at <= t + 1e-9:
                self._dispatch(pending.popleft())
            for agent in self.agents:
                agent.tick(t)
            sim_world.step(self.world, self.dt)
            tick += 1
            if stop_when_idle and not pending and self._quiescent():
                break
        return self

    def _dispatch(self, entry: ScriptEntry) -> None:
        via = entry.via or self.agents[0].name
        try:
            jobs = self.client.enqueue_job(via, entry.action, entry.target, entry.params)
        except (Rejected, NotFound) as err:
            self.rejected += 1
            self.log.add(
                self.t,
                {"event": "job_rejected", "action": entry.action, "target": entry.target, "error": str(err)},
            )
            return
        for job in jobs:
            self.script_job_ids.append(job["id"])
            self.log.add(
                self.t,
                {
                    "event": "job_enqueued",
                    "job_id": job["id"],
                    "task_id": job["task_id"],
                    "robot": job["robot"],
                    "action": job["action"],
                    "target": job["target_object"],
                    "role": job["role"],
                },
            )

    def _quiescent(self) -> bool:
        if any(agent._gen is not None for agent in self.agents):
            return False
        via = self.agents[0].name
        for job_id in self.script_job_ids:
            if self.client.get_job(via, job_id)["status"] not in ("done", "failed"):
                return False
        return True

    def job_statuses(self) -> dict[int, str]:
        via = self.agents[0].name
        return {j: self.client.get_job(via, j)["status"] for j in self.script_job_ids}

    def exit_code(self) -> int:
        if self.rejected:
            return 1
        statuses = self.job_statuses()
        return 0 if all(s == "done" for s in statuses.values()) else 1
