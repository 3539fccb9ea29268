"""Scenario files: scene graph + world config + scripted job sequence.

World file schema (JSON):
  seed            int, RNG seed for the world oracles
  drain_rate      battery fraction per meter (default 0.01)
  floor_z_max     z cutoff for the floor slab (default 0.05)
  reach_radius / observe_range / error_rate   optional overrides
  truths          {node_id: 0|1} ground-truth overrides for stateful objects
  wiring          {switch_id: [lamp_id, ...]} hidden circuits
  items           [{id, label, location}] movable inventory;
                  location is one of {"kind": "at_pose", "xy": [x, y]},
                  {"kind": "in_drawer", "drawer": id},
                  {"kind": "in_basket"|"in_gripper", "robot": name}
  robots          [{name, position, heading, battery, has_arm, has_basket,
                    speed, half_extents}]

Script file schema (JSON):
  {"jobs": [{"at": seconds, "action": ..., "target": node_id,
             "params": {...}, "via": robot_name}]}
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .agents import AgentConfig
from .scenegraph import (
    SceneGraph,
    SceneGraphError,
    SemanticClass,
    STATEFUL_CLASSES,
    load_json,
)
from .server.core import ACTION_CLASSES, JobAction, RobotInfo
from .sim import ScriptEntry
from .world import (
    AtPose,
    InBasket,
    InDrawer,
    InGripper,
    RobotBody,
    WorldState,
)


class ScenarioError(ValueError):
    pass


def load_scene_file(path: str | Path) -> SceneGraph:
    try:
        data = Path(path).read_bytes()
    except OSError as err:
        raise ScenarioError(f"cannot read {path}: {err}") from None
    return load_json(data)


def load_world_doc(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as err:
        raise ScenarioError(f"cannot read {path}: {err}") from None
    except json.JSONDecodeError as err:
        raise ScenarioError(f"malformed world file {path}: {err}") from None
    if not isinstance(doc, dict):
        raise ScenarioError(f"malformed world file {path}: not an object")
    return doc


def _parse_location(doc: dict):
    kind = doc.get("kind")
    if kind == "at_pose":
        xy = doc.get("xy")
        return AtPose((float(xy[0]), float(xy[1])))
    if kind == "in_drawer":
        return InDrawer(int(doc["drawer"]))
    if kind == "in_basket":
        return InBasket(str(doc["robot"]))
    if kind == "in_gripper":
        return InGripper(str(doc["robot"]))
    raise ScenarioError(f"unknown item location kind {kind!r}")


def build_world(scene: SceneGraph, doc: dict, seed: int | None = None) -> WorldState:
    robots = []
    for rdoc in doc.get("robots", []):
        robots.append(
            RobotBody(
                name=rdoc["name"],
                position=(float(rdoc["position"][0]), float(rdoc["position"][1])),
                heading=float(rdoc.get("heading", 0.0)),
                battery=float(rdoc.get("battery", 1.0)),
                has_arm=bool(rdoc.get("has_arm", False)),
                has_basket=bool(rdoc.get("has_basket", False)),
                speed=float(rdoc.get("speed", 1.0)),
                half_extents=tuple(rdoc.get("half_extents", (0.35, 0.25))),
            )
        )
    items = {}
    for idoc in doc.get("items", []):
        items[int(idoc["id"])] = (str(idoc["label"]), _parse_location(idoc["location"]))
    return WorldState(
        scene=scene,
        robots=robots,
        seed=doc.get("seed", 0) if seed is None else seed,
        truths={int(k): int(v) for k, v in doc.get("truths", {}).items()},
        wiring={int(k): set(v) for k, v in doc.get("wiring", {}).items()},
        items=items,
        drain_rate=float(doc.get("drain_rate", 0.01)),
        reach_radius=float(doc.get("reach_radius", 1.1)),
        observe_range=float(doc.get("observe_range", 5.0)),
        error_rate=float(doc.get("error_rate", 0.0)),
        floor_z_max=float(doc.get("floor_z_max", 0.05)),
    )


def robot_infos(doc: dict) -> list[RobotInfo]:
    return [
        RobotInfo(
            name=r["name"],
            has_arm=bool(r.get("has_arm", False)),
            has_basket=bool(r.get("has_basket", False)),
            half_extents=tuple(r.get("half_extents", (0.35, 0.25))),
        )
        for r in doc.get("robots", [])
    ]


def agent_configs(doc: dict, **overrides) -> list[AgentConfig]:
    return [
        AgentConfig(
            name=r["name"],
            has_arm=bool(r.get("has_arm", False)),
            has_basket=bool(r.get("has_basket", False)),
            **overrides,
        )
        for r in doc.get("robots", [])
    ]


def load_script_file(path: str | Path) -> list[ScriptEntry]:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as err:
        raise ScenarioError(f"cannot read {path}: {err}") from None
    except json.JSONDecodeError as err:
        raise ScenarioError(f"malformed script file {path}: {err}") from None
    entries = []
    for jdoc in doc.get("jobs", []):
        entries.append(
            ScriptEntry(
                at=float(jdoc["at"]),
                action=str(jdoc["action"]),
                target=int(jdoc["target"]),
                params=dict(jdoc.get("params", {})),
                via=jdoc.get("via"),
            )
        )
    return entries


def validate_files(scene_path, world_path, script_path=None) -> list[str]:
    """Cross-validate scenario inputs; an empty report means valid."""
    report: list[str] = []
    scene = None
    try:
        scene = load_scene_file(scene_path)
    except (ScenarioError, SceneGraphError) as err:
        report.append(f"scene: {err}")
    doc = None
    try:
        doc = load_world_doc(world_path)
    except ScenarioError as err:
        report.append(f"world: {err}")
    if scene is None or doc is None:
        return report
    report.extend(_validate_world(scene, doc))
    if script_path is not None:
        report.extend(_validate_script(scene, doc, script_path))
    return report


def _class_of(scene: SceneGraph, node_id: int) -> SemanticClass | None:
    node = scene.nodes.get(node_id)
    return None if node is None else node.semantic_class


def _validate_world(scene: SceneGraph, doc: dict) -> list[str]:
    report = []
    robots = doc.get("robots", [])
    if not robots:
        report.append("world: no robots defined")
    names = [r.get("name") for r in robots]
    if len(set(names)) != len(names):
        report.append("world: duplicate robot names")
    for r in robots:
        battery = r.get("battery", 1.0)
        if not 0.0 <= battery <= 1.0:
            report.append(f"world: robot {r.get('name')}: battery outside [0,1]")
        pos = r.get("position")
        if not (isinstance(pos, list) and len(pos) == 2 and all(math.isfinite(v) for v in pos)):
            report.append(f"world: robot {r.get('name')}: bad position")
    for key, value in doc.get("truths", {}).items():
        node_id = int(key)
        cls = _class_of(scene, node_id)
        if cls is None:
            report.append(f"world: truths references missing node {node_id}")
        elif cls not in STATEFUL_CLASSES:
            report.append(f"world: truths on stateless node {node_id} ({cls.value})")
        if value not in (0, 1):
            report.append(f"world: truths[{node_id}] must be 0 or 1")
    for key, lamps in doc.get("wiring", {}).items():
        switch_id = int(key)
        if _class_of(scene, switch_id) != SemanticClass.LIGHT_SWITCH:
            report.append(f"world: wiring key {switch_id} is not a light_switch")
        for lamp_id in lamps:
            if _class_of(scene, int(lamp_id)) != SemanticClass.LAMP:
                report.append(f"world: wiring {switch_id} -> {lamp_id} targets a non-lamp")
    for idoc in doc.get("items", []):
        item_id = int(idoc.get("id", -1))
        if _class_of(scene, item_id) != SemanticClass.MOVABLE:
            report.append(f"world: item {item_id} is not a movable node")
        loc = idoc.get("location", {})
        if loc.get("kind") == "in_drawer":
            drawer_id = int(loc.get("drawer", -1))
            if _class_of(scene, drawer_id) not in (SemanticClass.DRAWER, SemanticClass.SWING_DOOR):
                report.append(f"world: item {item_id} stored in non-container {drawer_id}")
        elif loc.get("kind") in ("in_basket", "in_gripper"):
            if loc.get("robot") not in names:
                report.append(f"world: item {item_id} held by unknown robot {loc.get('robot')}")
        elif loc.get("kind") != "at_pose":
            report.append(f"world: item {item_id} has unknown location kind {loc.get('kind')!r}")
    return report


def _validate_script(scene: SceneGraph, doc: dict, script_path) -> list[str]:
    report = []
    try:
        entries = load_script_file(script_path)
    except ScenarioError as err:
        return [f"script: {err}"]
    names = [r.get("name") for r in doc.get("robots", [])]
    last_at = -math.inf
    for i, entry in enumerate(entries):
        if entry.at < last_at:
            report.append(f"script: jobs[{i}] time {entry.at} decreases")
        last_at = max(last_at, entry.at)
        try:
            action = JobAction(entry.action)
        except ValueError:
            report.append(f"script: jobs[{i}] unknown action {entry.action!r}")
            continue
        cls = _class_of(scene, entry.target)
        if cls is None:
            report.append(f"script: jobs[{i}] references missing node {entry.target}")
        elif cls not in ACTION_CLASSES[action]:
            report.append(f"script: jobs[{i}] action {entry.action} invalid for {cls.value}")
        if entry.via is not None and entry.via not in names:
            report.append(f"script: jobs[{i}] via unknown robot {entry.via!r}")
    return report
