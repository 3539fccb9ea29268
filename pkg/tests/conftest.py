import math
from pathlib import Path

import pytest

from scenefleet.agents import RobotAgent
from scenefleet.scenario import agent_configs, build_world, load_scene_file, load_world_doc, robot_infos
from scenefleet.scenegraph import (
    MotionPrimitive,
    NodeState,
    ObjectNode,
    Pose,
    PrimitiveKind,
    SceneGraph,
    SemanticClass,
    build_spatial_edges,
)
from scenefleet.server.core import CoordinationCore
from scenefleet.sim import ScriptEntry, Simulation
from scenefleet.transport import LocalClient

DEMO = Path(__file__).parent.parent / "scenarios" / "demo_room"

UP = (0.0, 0.0, 1.0)


def mknode(node_id, cls=SemanticClass.FURNITURE, at=(0.0, 0.0, 0.5), points=None,
           primitives=(), state=None):
    """Small helper: a node with a default 2x2 point patch around `at`."""
    if points is None:
        x, y, z = at
        points = tuple(
            (x + dx, y + dy, z, 1.0) for dx in (-0.05, 0.05) for dy in (-0.05, 0.05)
        )
    if state is None:
        state = NodeState.ONE if cls in (SemanticClass.DRAWER, SemanticClass.SWING_DOOR) else (
            NodeState.ZERO if cls == SemanticClass.LAMP else NodeState.NONE
        )
    return ObjectNode(
        id=node_id, semantic_class=cls, pose=Pose(origin=at, normal=UP),
        points=points, primitives=tuple(primitives), state=state,
    )


def mkgraph(nodes, edges=None, revision=0):
    node_map = {n.id: n for n in nodes}
    if edges is None:
        edges = build_spatial_edges(node_map) if len(node_map) > 1 else frozenset()
    return SceneGraph(nodes=node_map, edges=frozenset(edges), revision=revision)


@pytest.fixture
def demo_paths():
    return {
        "scene": DEMO / "scene.json",
        "world": DEMO / "world.json",
        "single": DEMO / "script_single.json",
        "fetch": DEMO / "script_fetch.json",
        "search": DEMO / "script_search.json",
        "search_miss": DEMO / "script_search_miss.json",
        "operate": DEMO / "script_operate.json",
    }


def run_demo(entries, duration=120.0, seed=None, stop_when_idle=True, config_overrides=None,
             per_agent_overrides=None):
    """Run a scripted scenario against the demo_room fixtures in-memory.

    Returns (sim, core, world); config_overrides apply to every agent,
    per_agent_overrides maps robot name to attribute overrides.
    """
    scene = load_scene_file(DEMO / "scene.json")
    doc = load_world_doc(DEMO / "world.json")
    world = build_world(scene, doc, seed=seed)
    core = CoordinationCore(scene, robot_infos(doc))
    client = LocalClient(core)
    configs = agent_configs(doc, **(config_overrides or {}))
    for config in configs:
        for key, value in (per_agent_overrides or {}).get(config.name, {}).items():
            setattr(config, key, value)
    names = [c.name for c in configs]
    agents = [
        RobotAgent(c, client, world, peer=(names[1] if c.name == names[0] else names[0]))
        for c in configs
    ]
    sim = Simulation(world, client, agents, [ScriptEntry(**e) for e in entries])
    sim.run(duration, stop_when_idle=stop_when_idle)
    return sim, core, world


@pytest.fixture
def small_graph():
    """Switch + two lamps + drawer + furniture, spaced on a line."""
    press = MotionPrimitive(PrimitiveKind.PRESS, (0.0, 0.0, 1.0), (1.0, 0.0, 0.0), 0.0)
    slide = MotionPrimitive(PrimitiveKind.TRANSLATION, (4.0, 0.0, 0.5), (0.0, -1.0, 0.0), 0.3)
    return mkgraph([
        mknode(0, SemanticClass.LIGHT_SWITCH, at=(0.0, 0.0, 1.0), primitives=(press,)),
        mknode(1, SemanticClass.LAMP, at=(1.0, 0.0, 0.5)),
        mknode(2, SemanticClass.LAMP, at=(2.0, 0.0, 0.5)),
        mknode(3, SemanticClass.FURNITURE, at=(3.0, 0.0, 0.5)),
        mknode(4, SemanticClass.DRAWER, at=(4.0, 0.0, 0.5), primitives=(slide,)),
    ])
