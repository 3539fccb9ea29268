"""HTTP layer: FastAPI app exposing the per-robot coordination endpoints.

Every path is prefixed /robots/{name}/ so one process can host each robot's
logical server; GET /scene serves the canonical scene-graph document.
"""

from __future__ import annotations

import asyncio
import json

from fastapi import FastAPI, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse

from .core import CoordinationCore, JobAction, JobStatus, NotFound, Rejected, RobotStateMsg
from .schemas import (
    FeedEntryOut,
    InboxEntryOut,
    JobIn,
    JobListOut,
    JobOut,
    JobStatusIn,
    LinkIn,
    ObjectChangeIn,
    RelayIn,
    RobotInfoOut,
    RobotStateIn,
    RobotStateOut,
    SeqOut,
)


def create_app(core: CoordinationCore) -> FastAPI:
    app = FastAPI(title="scenefleet coordination server")
    app.state.core = core
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(NotFound)
    async def _not_found(request: Request, exc: NotFound):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(Rejected)
    async def _rejected(request: Request, exc: Rejected):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/robots", response_model=list[RobotInfoOut])
    def list_robots():
        return [r.to_dict() for r in core.robots()]

    @app.post("/robots/{name}/state")
    def post_state(name: str, body: RobotStateIn):
        core.post_state(
            name,
            RobotStateMsg(
                battery=body.battery,
                position=tuple(body.position),
                heading=body.heading,
                status=body.status,
                timestamp=body.timestamp,
            ),
        )
        return {"ok": True}

    @app.get("/robots/{name}/state", response_model=RobotStateOut | None)
    def get_state(name: str):
        msg = core.get_state(name)
        return None if msg is None else msg.to_dict()

    @app.post("/robots/{name}/object_changes", response_model=SeqOut)
    def post_change(name: str, body: ObjectChangeIn):
        seq = core.post_change(name, body.object_id, body.state, body.timestamp)
        return {"seq": seq}

    @app.get(
        "/robots/{name}/object_changes",
        response_model=list[FeedEntryOut],
        response_model_exclude_none=True,
    )
    def get_changes(name: str, since: int = Query(default=0, ge=0)):
        return [e.to_dict() for e in core.get_changes(name, since)]

    @app.post("/robots/{name}/links", response_model=SeqOut)
    def post_link(name: str, body: LinkIn):
        seq = core.post_link(name, body.from_id, body.to_id, body.timestamp)
        return {"seq": seq}

    @app.get("/robots/{name}/events")
    async def event_stream(name: str, since: int = Query(default=0, ge=0)):
        """Server-sent events mirror of the change feed (polling stays primary)."""
        core._hub(name)

        async def generate():
            cursor = since
            while True:
                for entry in core.get_changes(name, cursor):
                    cursor = entry.seq
                    yield f"data: {json.dumps(entry.to_dict(), sort_keys=True)}\n\n"
                await asyncio.sleep(0.05)

        return StreamingResponse(generate(), media_type="text/event-stream")

    @app.post("/robots/{name}/jobs", response_model=JobListOut)
    def enqueue_job(name: str, body: JobIn):
        core._hub(name)  # the posting prefix must name a registered robot
        jobs = core.enqueue(JobAction(body.action), body.target_object, body.params)
        return {"jobs": [j.to_dict() for j in jobs]}

    @app.get("/robots/{name}/jobs/next", response_model=JobOut | None)
    def next_job(name: str):
        job = core.next_job(name)
        return None if job is None else job.to_dict()

    @app.get("/robots/{name}/jobs", response_model=JobListOut)
    def list_jobs(name: str):
        return {"jobs": [j.to_dict() for j in core.list_jobs(name)]}

    @app.get("/robots/{name}/jobs/{job_id}", response_model=JobOut)
    def get_job(name: str, job_id: int):
        return core.get_job(job_id).to_dict()

    @app.post("/robots/{name}/jobs/{job_id}/status", response_model=JobOut)
    def update_job(name: str, job_id: int, body: JobStatusIn):
        job = core.update_job(job_id, JobStatus(body.status), body.result)
        return job.to_dict()

    @app.post("/robots/{name}/relay", response_model=SeqOut)
    def relay(name: str, body: RelayIn):
        seq = core.relay(name, body.to, body.message, body.timestamp)
        return {"seq": seq}

    @app.get("/robots/{name}/inbox", response_model=list[InboxEntryOut])
    def get_inbox(name: str, since: int = Query(default=0, ge=0)):
        return [e.to_dict() for e in core.get_inbox(name, since)]

    @app.get("/scene")
    def get_scene():
        return Response(content=core.scene_json(), media_type="application/json")

    return app
