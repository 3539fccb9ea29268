from .core import (
    CoordinationCore,
    FeedEntry,
    Job,
    JobAction,
    JobStatus,
    NotFound,
    Rejected,
    RobotInfo,
    RobotStateMsg,
)

__all__ = [
    "CoordinationCore",
    "FeedEntry",
    "Job",
    "JobAction",
    "JobStatus",
    "NotFound",
    "Rejected",
    "RobotInfo",
    "RobotStateMsg",
]
