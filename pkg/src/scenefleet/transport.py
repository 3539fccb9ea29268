"""Two interchangeable server clients: direct in-process calls and real HTTP.

Agents and the scenario runner only ever talk through this surface, so the
single-process and socket deployments execute identical logic. Both clients
return the same plain-dict payload shapes and raise the same error types.
"""

from __future__ import annotations

import httpx

from .server.core import CoordinationCore, JobAction, JobStatus, NotFound, Rejected, RobotStateMsg


class LocalClient:
    """In-memory transport: calls the coordination core directly."""

    def __init__(self, core: CoordinationCore):
        self.core = core

    def list_robots(self) -> list[dict]:
        return [r.to_dict() for r in self.core.robots()]

    def post_state(self, robot, battery, position, heading, status, timestamp) -> None:
        self.core.post_state(
            robot,
            RobotStateMsg(
                battery=battery,
                position=(position[0], position[1]),
                heading=heading,
                status=status,
                timestamp=timestamp,
            ),
        )

    def get_state(self, robot) -> dict | None:
        msg = self.core.get_state(robot)
        return None if msg is None else msg.to_dict()

    def post_change(self, robot, object_id, state, timestamp=0.0) -> int:
        return self.core.post_change(robot, object_id, state, timestamp)

    def post_link(self, robot, from_id, to_id, timestamp=0.0) -> int:
        return self.core.post_link(robot, from_id, to_id, timestamp)

    def get_changes(self, robot, since=0) -> list[dict]:
        return [e.to_dict() for e in self.core.get_changes(robot, since)]

    def enqueue_job(self, via, action, target, params=None) -> list[dict]:
        self.core._hub(via)
        jobs = self.core.enqueue(JobAction(action), target, params or {})
        return [j.to_dict() for j in jobs]

    def next_job(self, robot) -> dict | None:
        job = self.core.next_job(robot)
        return None if job is None else job.to_dict()

    def update_job(self, via, job_id, status, result=None) -> dict:
        return self.core.update_job(job_id, JobStatus(status), result).to_dict()

    def get_job(self, via, job_id) -> dict:
        return self.core.get_job(job_id).to_dict()

    def list_jobs(self, robot) -> list[dict]:
        return [j.to_dict() for j in self.core.list_jobs(robot)]

    def relay(self, sender, to, message, timestamp=0.0) -> int:
        return self.core.relay(sender, to, message, timestamp)

    def get_inbox(self, robot, since=0) -> list[dict]:
        return [e.to_dict() for e in self.core.get_inbox(robot, since)]

    def get_scene(self) -> bytes:
        return self.core.scene_json()

    def close(self) -> None:
        pass


class HttpClient:
    """Socket transport: same surface as LocalClient over the HTTP API."""

    def __init__(self, base_url: str, timeout: float = 10.0):
        self._http = httpx.Client(base_url=base_url, timeout=timeout)

    def _check(self, resp: httpx.Response):
        if resp.status_code == 404:
            raise NotFound(resp.json().get("detail", "not found"))
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail")
            except Exception:
                detail = resp.text
            raise Rejected(str(detail))
        return resp

    def list_robots(self) -> list[dict]:
        return self._check(self._http.get("/robots")).json()

    def post_state(self, robot, battery, position, heading, status, timestamp) -> None:
        self._check(
            self._http.post(
                f"/robots/{robot}/state",
                json={
                    "battery": battery,
                    "position": [position[0], position[1]],
                    "heading": heading,
                    "status": status,
                    "timestamp": timestamp,
                },
            )
        )

    def get_state(self, robot) -> dict | None:
        return self._check(self._http.get(f"/robots/{robot}/state")).json()

    def post_change(self, robot, object_id, state, timestamp=0.0) -> int:
        resp = self._check(
            self._http.post(
                f"/robots/{robot}/object_changes",
                json={"object_id": object_id, "state": state, "timestamp": timestamp},
            )
        )
        return resp.json()["seq"]

    def post_link(self, robot, from_id, to_id, timestamp=0.0) -> int:
        resp = self._check(
            self._http.post(
                f"/robots/{robot}/links",
                json={"from": from_id, "to": to_id, "timestamp": timestamp},
            )
        )
        return resp.json()["seq"]

    def get_changes(self, robot, since=0) -> list[dict]:
        return self._check(
            self._http.get(f"/robots/{robot}/object_changes", params={"since": since})
        ).json()

    def enqueue_job(self, via, action, target, params=None) -> list[dict]:
        resp = self._check(
            self._http.post(
                f"/robots/{via}/jobs",
                json={"action": action, "target_object": target, "params": params or {}},
            )
        )
        return resp.json()["jobs"]

    def next_job(self, robot) -> dict | None:
        return self._check(self._http.get(f"/robots/{robot}/jobs/next")).json()

    def update_job(self, via, job_id, status, result=None) -> dict:
        resp = self._check(
            self._http.post(
                f"/robots/{via}/jobs/{job_id}/status",
                json={"status": status, "result": result},
            )
        )
        return resp.json()

    def get_job(self, via, job_id) -> dict:
        return self._check(self._http.get(f"/robots/{via}/jobs/{job_id}")).json()

    def list_jobs(self, robot) -> list[dict]:
        return self._check(self._http.get(f"/robots/{robot}/jobs")).json()["jobs"]

    def relay(self, sender, to, message, timestamp=0.0) -> int:
        resp = self._check(
            self._http.post(
                f"/robots/{sender}/relay",
                json={"to": to, "message": message, "timestamp": timestamp},
            )
        )
        return resp.json()["seq"]

    def get_inbox(self, robot, since=0) -> list[dict]:
        return self._check(
            self._http.get(f"/robots/{robot}/inbox", params={"since": since})
        ).json()

    def get_scene(self) -> bytes:
        return self._check(self._http.get("/scene")).content

    def close(self) -> None:
        self._http.close()
