"""Scene-graph driven multi-robot coordination: shared scene model, grid
planner, deterministic world simulation, per-robot coordination servers,
and task-running agents."""

__version__ = "0.1.0"
