"""Pydantic request/response models for the coordination HTTP API."""

from __future__ import annotations

import math
from typing import Literal, Optional

from pydantic import BaseModel, Field


class RobotStateIn(BaseModel):
    battery: float = Field(ge=0.0, le=1.0)
    position: tuple[float, float]
    heading: float = Field(ge=0.0, le=2.0 * math.pi)
    status: Literal["IDLE", "BUSY"]
    timestamp: float


class RobotStateOut(RobotStateIn):
    pass


class RobotInfoOut(BaseModel):
    name: str
    has_arm: bool
    has_basket: bool
    half_extents: tuple[float, float]


class ObjectChangeIn(BaseModel):
    object_id: int = Field(ge=0)
    state: Literal[0, 1]
    timestamp: float = 0.0


class LinkIn(BaseModel):
    from_id: int = Field(ge=0, alias="from")
    to_id: int = Field(ge=0, alias="to")
    timestamp: float = 0.0


class SeqOut(BaseModel):
    seq: int


class FeedEntryOut(BaseModel):
    seq: int
    timestamp: float
    kind: Literal["state", "link"]
    object_id: Optional[int] = None
    state: Optional[int] = None
    from_id: Optional[int] = Field(default=None, alias="from")
    to_id: Optional[int] = Field(default=None, alias="to")

    model_config = {"populate_by_name": True}


class JobIn(BaseModel):
    action: Literal[
        "open",
        "close",
        "toggle_switch",
        "grasp",
        "state_check",
        "fetch_and_drop",
        "search_and_drop",
        "operate_and_check",
    ]
    target_object: int = Field(ge=0)
    params: dict = Field(default_factory=dict)


class JobOut(BaseModel):
    id: int
    task_id: int
    robot: str
    action: str
    target_object: int
    role: str
    params: dict
    status: str
    result: Optional[str] = None


class JobListOut(BaseModel):
    jobs: list[JobOut]


class JobStatusIn(BaseModel):
    status: Literal["assigned", "running", "done", "failed"]
    result: Optional[str] = None


class RelayIn(BaseModel):
    to: str
    message: dict
    timestamp: float = 0.0


class InboxEntryOut(BaseModel):
    seq: int
    timestamp: float
    from_robot: str = Field(alias="from")
    message: dict

    model_config = {"populate_by_name": True}
