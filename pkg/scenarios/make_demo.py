#!/usr/bin/env python3
"""Regenerate the demo_room fixture scenario (scene, world, scripts).

The room is an 8 x 6 m space with wall points on the perimeter, two
containers along the north wall, a wall switch wired to two of the three
lamps, and two movables (one on the table, one inside the drawer).
"""

import json
import math
from pathlib import Path

import numpy as np

from scenefleet.scenegraph import (
    Edge,
    MotionPrimitive,
    ObjectNode,
    Pose,
    PrimitiveKind,
    Relation,
    SceneGraph,
    SemanticClass,
    NodeState,
    build_spatial_edges,
    save_json,
)

OUT = Path(__file__).parent / "demo_room"


def box_points(x0, x1, y0, y1, z0, z1, step=0.1):
    xs = np.arange(x0, x1 + 1e-9, step)
    ys = np.arange(y0, y1 + 1e-9, step)
    zs = np.arange(z0, z1 + 1e-9, step)
    pts = [(round(x, 4), round(y, 4), round(z, 4), 1.0) for x in xs for y in ys for z in zs]
    return tuple(pts)


def plane_points(axis, value, u0, u1, v0, v1, step=0.1):
    us = np.arange(u0, u1 + 1e-9, step)
    vs = np.arange(v0, v1 + 1e-9, step)
    pts = []
    for u in us:
        for v in vs:
            if axis == "y":  # plane of constant y: u -> x, v -> z
                pts.append((round(u, 4), value, round(v, 4), 1.0))
            else:            # plane of constant x: u -> y, v -> z
                pts.append((value, round(u, 4), round(v, 4), 1.0))
    return tuple(pts)


def wall_points(step=0.1):
    pts = []
    for z in (0.5, 1.0):
        for x in np.arange(0.0, 8.0 + 1e-9, step):
            pts.append((round(x, 4), 0.0, z, 1.0))
            pts.append((round(x, 4), 6.0, z, 1.0))
        for y in np.arange(step, 6.0 - step + 1e-9, step):
            pts.append((0.0, round(y, 4), z, 1.0))
            pts.append((8.0, round(y, 4), z, 1.0))
    return tuple(pts)


def cylinder_points(cx, cy, radius, z0, z1, n=8, zstep=0.15):
    pts = []
    for z in np.arange(z0, z1 + 1e-9, zstep):
        for k in range(n):
            a = 2 * math.pi * k / n
            pts.append(
                (round(cx + radius * math.cos(a), 4), round(cy + radius * math.sin(a), 4), round(z, 4), 1.0)
            )
    return tuple(pts)


def up(origin):
    return Pose(origin=origin, normal=(0.0, 0.0, 1.0))


def make_scene() -> SceneGraph:
    nodes = {}

    def add(node):
        nodes[node.id] = node

    add(ObjectNode(0, SemanticClass.OTHER, up((4.0, 3.0, 0.75)), wall_points()))
    add(ObjectNode(1, SemanticClass.FURNITURE, up((2.0, 5.4, 0.55)),
                   box_points(1.4, 2.6, 5.2, 5.6, 0.1, 1.0)))
    add(ObjectNode(
        2, SemanticClass.DRAWER,
        Pose(origin=(2.0, 5.15, 0.55), normal=(0.0, -1.0, 0.0)),
        plane_points("y", 5.15, 1.7, 2.3, 0.4, 0.7),
        primitives=(MotionPrimitive(PrimitiveKind.TRANSLATION, (2.0, 5.15, 0.55), (0.0, -1.0, 0.0), 0.35),),
        state=NodeState.ONE,
    ))
    add(ObjectNode(3, SemanticClass.FURNITURE, up((6.5, 5.4, 0.95)),
                   box_points(6.0, 7.0, 5.2, 5.6, 0.1, 1.8)))
    add(ObjectNode(
        4, SemanticClass.SWING_DOOR,
        Pose(origin=(6.5, 5.15, 1.0), normal=(0.0, -1.0, 0.0)),
        plane_points("y", 5.15, 6.1, 6.9, 0.3, 1.7),
        primitives=(MotionPrimitive(PrimitiveKind.ROTATION, (6.12, 5.15, 1.0), (0.0, 0.0, 1.0), math.pi / 2),),
        state=NodeState.ONE,
    ))
    add(ObjectNode(
        5, SemanticClass.LIGHT_SWITCH,
        Pose(origin=(7.9, 2.5, 1.1), normal=(-1.0, 0.0, 0.0)),
        plane_points("x", 7.9, 2.46, 2.54, 1.06, 1.14, step=0.04),
        primitives=(MotionPrimitive(PrimitiveKind.PRESS, (7.9, 2.5, 1.1), (1.0, 0.0, 0.0), 0.0),),
    ))
    add(ObjectNode(6, SemanticClass.LAMP, up((1.2, 1.2, 0.8)),
                   cylinder_points(1.2, 1.2, 0.15, 0.2, 1.5), state=NodeState.ZERO))
    add(ObjectNode(7, SemanticClass.LAMP, up((4.5, 0.6, 0.95)),
                   cylinder_points(4.5, 0.6, 0.1, 0.8, 1.1, zstep=0.1), state=NodeState.ZERO))
    add(ObjectNode(8, SemanticClass.FURNITURE, up((4.5, 0.6, 0.4)),
                   box_points(4.0, 5.0, 0.3, 0.9, 0.1, 0.75)))
    add(ObjectNode(9, SemanticClass.LAMP, up((7.0, 0.8, 0.8)),
                   cylinder_points(7.0, 0.8, 0.15, 0.2, 1.5), state=NodeState.ZERO))
    add(ObjectNode(10, SemanticClass.MOVABLE, up((4.2, 0.6, 0.8)),
                   cylinder_points(4.2, 0.6, 0.04, 0.78, 0.9, n=6, zstep=0.06)))
    add(ObjectNode(11, SemanticClass.MOVABLE, up((2.0, 5.35, 0.55)),
                   cylinder_points(2.0, 5.35, 0.04, 0.5, 0.6, n=6, zstep=0.05)))

    edges = build_spatial_edges(nodes)
    return SceneGraph(nodes=nodes, edges=edges, revision=0)


WORLD = {
    "seed": 7,
    "drain_rate": 0.01,
    "floor_z_max": 0.05,
    "wiring": {"5": [6, 9]},
    "items": [
        {"id": 10, "label": "bottle", "location": {"kind": "at_pose", "xy": [4.2, 0.6]}},
        {"id": 11, "label": "mug", "location": {"kind": "in_drawer", "drawer": 2}},
    ],
    "robots": [
        {"name": "alpha", "position": [3.0, 2.5], "heading": 0.0, "battery": 1.0,
         "has_arm": True, "has_basket": False, "speed": 1.0, "half_extents": [0.35, 0.25]},
        {"name": "beta", "position": [5.5, 3.0], "heading": 3.141593, "battery": 1.0,
         "has_arm": False, "has_basket": True, "speed": 1.0, "half_extents": [0.35, 0.25]},
    ],
}

SCRIPTS = {
    "script_single.json": {
        "jobs": [
            {"at": 0.5, "action": "open", "target": 2, "via": "alpha"},
            {"at": 20.0, "action": "close", "target": 2, "via": "alpha"},
            {"at": 40.0, "action": "state_check", "target": 6, "via": "beta"},
        ]
    },
    "script_fetch.json": {
        "jobs": [{"at": 0.5, "action": "fetch_and_drop", "target": 10, "via": "alpha"}]
    },
    "script_search.json": {
        "jobs": [
            {"at": 0.5, "action": "search_and_drop", "target": 2,
             "params": {"query_label": "mug"}, "via": "alpha"}
        ]
    },
    "script_search_miss.json": {
        "jobs": [
            {"at": 0.5, "action": "search_and_drop", "target": 4,
             "params": {"query_label": "mug"}, "via": "alpha"}
        ]
    },
    "script_operate.json": {
        "jobs": [{"at": 0.5, "action": "operate_and_check", "target": 5, "via": "alpha"}]
    },
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    scene = make_scene()
    (OUT / "scene.json").write_bytes(save_json(scene))
    (OUT / "world.json").write_text(json.dumps(WORLD, indent=2) + "\n")
    for name, doc in SCRIPTS.items():
        (OUT / name).write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote fixtures to {OUT} ({len(scene.nodes)} nodes, {len(scene.edges)} edges)")


if __name__ == "__main__":
    main()
