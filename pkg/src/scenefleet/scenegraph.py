"""Object-centric scene graph: typed nodes, spatial/functional edges, canonical JSON.

Graphs are immutable snapshots. Mutating operations return a new graph with the
revision bumped; callers never see a half-applied update.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

UNIT_TOL = 1e-6


class SceneGraphError(ValueError):
    pass


class SemanticClass(str, Enum):
    DRAWER = "drawer"
    SWING_DOOR = "swing_door"
    LIGHT_SWITCH = "light_switch"
    LAMP = "lamp"
    MOVABLE = "movable"
    FURNITURE = "furniture"
    OTHER = "other"


class NodeState(str, Enum):
    ZERO = "zero"
    ONE = "one"
    NONE = "none"


class PrimitiveKind(str, Enum):
    TRANSLATION = "translation"
    ROTATION = "rotation"
    PRESS = "press"


class Relation(str, Enum):
    SPATIAL = "spatial"
    POWERS = "powers"


# Classes that carry a tracked binary state; everything else stays stateless.
STATEFUL_CLASSES = frozenset(
    {SemanticClass.DRAWER, SemanticClass.SWING_DOOR, SemanticClass.LAMP}
)


def _check_unit(vec: tuple[float, float, float], what: str) -> None:
    n = math.sqrt(vec[0] ** 2 + vec[1] ** 2 + vec[2] ** 2)
    if not (1.0 - UNIT_TOL <= n <= 1.0 + UNIT_TOL):
        raise SceneGraphError(f"{what} is not unit length (norm={n})")


def _check_finite(vec: tuple[float, ...], what: str) -> None:
    if not all(math.isfinite(v) for v in vec):
        raise SceneGraphError(f"{what} has non-finite components")


@dataclass(frozen=True)
class Pose:
    """World-frame pose: an origin point and a unit normal direction."""

    origin: tuple[float, float, float]
    normal: tuple[float, float, float]

    def __post_init__(self):
        _check_finite(self.origin, "pose origin")
        _check_unit(self.normal, "pose normal")


@dataclass(frozen=True)
class MotionPrimitive:
    """Parameterized interaction motion attached to a functional element.

    kind=translation: slide along `axis` by up to `range` meters.
    kind=rotation: swing about hinge `axis` by up to `range` radians.
    kind=press: push at `origin` along `axis`; range is always 0.
    """

    kind: PrimitiveKind
    origin: tuple[float, float, float]
    axis: tuple[float, float, float]
    range: float

    def __post_init__(self):
        _check_finite(self.origin, "primitive origin")
        _check_unit(self.axis, "primitive axis")
        if self.range < 0:
            raise SceneGraphError("primitive range must be >= 0")
        if self.kind == PrimitiveKind.PRESS and self.range != 0:
            raise SceneGraphError("press primitive must have range 0")


@dataclass(frozen=True)
class ObjectNode:
    """One scene object: pose, class, point samples, primitives, tri-valued state."""

    id: int
    semantic_class: SemanticClass
    pose: Pose
    points: tuple[tuple[float, float, float, float], ...]
    primitives: tuple[MotionPrimitive, ...] = ()
    state: NodeState = NodeState.NONE

    def __post_init__(self):
        if self.id < 0:
            raise SceneGraphError("node id must be non-negative")
        if not self.points:
            raise SceneGraphError(f"node {self.id} has no points")
        if self.semantic_class in STATEFUL_CLASSES:
            if self.state == NodeState.NONE:
                raise SceneGraphError(
                    f"node {self.id} ({self.semantic_class.value}) requires a binary state"
                )
        elif self.state != NodeState.NONE:
            raise SceneGraphError(
                f"node {self.id} ({self.semantic_class.value}) cannot carry a state"
            )

    def centroid(self) -> np.ndarray:
        """Mean of the point samples (x, y, z)."""
        pts = np.asarray(self.points, dtype=float)
        return pts[:, :3].mean(axis=0)


@dataclass(frozen=True, order=True)
class Edge:
    from_id: int
    to_id: int
    relation: Relation

    def __post_init__(self):
        if self.from_id == self.to_id:
            raise SceneGraphError("edge endpoints must differ")


@dataclass(frozen=True)
class SceneGraph:
    """Immutable snapshot of the shared scene: nodes by id, edges, revision."""

    nodes: dict[int, ObjectNode] = field(default_factory=dict)
    edges: frozenset[Edge] = field(default_factory=frozenset)
    revision: int = 0

    def __post_init__(self):
        for node_id, node in self.nodes.items():
            if node_id != node.id:
                raise SceneGraphError(f"node keyed {node_id} has id {node.id}")
        for edge in self.edges:
            if edge.from_id not in self.nodes or edge.to_id not in self.nodes:
                raise SceneGraphError(f"edge ({edge.from_id},{edge.to_id}) endpoint missing")
            if edge.relation == Relation.POWERS:
                src = self.nodes[edge.from_id].semantic_class
                dst = self.nodes[edge.to_id].semantic_class
                if src != SemanticClass.LIGHT_SWITCH or dst != SemanticClass.LAMP:
                    raise SceneGraphError("invalid link endpoints")

    def node(self, node_id: int) -> ObjectNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise SceneGraphError("no such object") from None

    def nodes_of_class(self, cls: SemanticClass) -> list[ObjectNode]:
        return [n for n in sorted(self.nodes.values(), key=lambda n: n.id) if n.semantic_class == cls]


@dataclass(frozen=True)
class ObjectChange:
    """A binary state-change message: which object, and its new 0/1 state."""

    object_id: int
    state: int  # 0 or 1

    def __post_init__(self):
        if self.state not in (0, 1):
            raise SceneGraphError("change state must be 0 or 1")


def build_spatial_edges(nodes: dict[int, ObjectNode]) -> frozenset[Edge]:
    """Connect every node to its nearest neighbor by point-cloud centroid.

    Edges are undirected (stored with from_id < to_id) and deduplicated;
    distance ties resolve toward the lower neighbor id.
    """
    if not nodes:
        raise SceneGraphError("empty graph")
    ids = sorted(nodes)
    if len(ids) == 1:
        return frozenset()
    centroids = {i: nodes[i].centroid() for i in ids}
    edges = set()
    for i in ids:
        best_id, best_d = None, math.inf
        for j in ids:
            if j == i:
                continue
            d = float(np.linalg.norm(centroids[i] - centroids[j]))
            if d < best_d or (d == best_d and (best_id is None or j < best_id)):
                best_id, best_d = j, d
        a, b = min(i, best_id), max(i, best_id)
        edges.add(Edge(a, b, Relation.SPATIAL))
    return frozenset(edges)


def apply_object_change(graph: SceneGraph, change: ObjectChange) -> SceneGraph:
    """Set the target node's binary state; bumps the revision even when idempotent."""
    node = graph.node(change.object_id)
    if node.semantic_class not in STATEFUL_CLASSES:
        raise SceneGraphError("object has no state")
    new_state = NodeState.ZERO if change.state == 0 else NodeState.ONE
    nodes = dict(graph.nodes)
    nodes[change.object_id] = replace(node, state=new_state)
    return SceneGraph(nodes=nodes, edges=graph.edges, revision=graph.revision + 1)


def add_functional_link(graph: SceneGraph, switch_id: int, lamp_id: int) -> SceneGraph:
    """Record a discovered switch->lamp powers edge (set semantics)."""
    switch = graph.node(switch_id)
    lamp = graph.node(lamp_id)
    if switch.semantic_class != SemanticClass.LIGHT_SWITCH or lamp.semantic_class != SemanticClass.LAMP:
        raise SceneGraphError("invalid link endpoints")
    edge = Edge(switch_id, lamp_id, Relation.POWERS)
    return SceneGraph(
        nodes=graph.nodes, edges=graph.edges | {edge}, revision=graph.revision + 1
    )


def interpret_state(semantic_class: SemanticClass, state: NodeState) -> str:
    """Class-dependent display label for a binary state.

    Drawers and swing doors: 0=open, 1=closed. Lamps: 0=off, 1=on.
    """
    if state == NodeState.NONE:
        raise SceneGraphError("stateless object")
    if semantic_class in (SemanticClass.DRAWER, SemanticClass.SWING_DOOR):
        return "open" if state == NodeState.ZERO else "closed"
    if semantic_class == SemanticClass.LAMP:
        return "off" if state == NodeState.ZERO else "on"
    raise SceneGraphError("stateless object")


# ---------------------------------------------------------------------------
# Canonical JSON: sorted keys, nodes sorted by id, edges by (from, to, relation),
# all floats rendered with exactly 6 decimals so serialization is a fixed point.
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, bool):
        raise SceneGraphError("unexpected boolean in scene document")
    if isinstance(value, float):
        return f"{value:.6f}"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_fmt(v) for v in value) + "]"
    if isinstance(value, dict):
        items = sorted(value.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_fmt(v)}" for k, v in items) + "}"
    raise SceneGraphError(f"unserializable value {value!r}")


def _node_doc(node: ObjectNode) -> dict:
    return {
        "id": node.id,
        "class": node.semantic_class.value,
        "pose": {
            "origin": [float(v) for v in node.pose.origin],
            "normal": [float(v) for v in node.pose.normal],
        },
        "points": [[float(c) for c in p] for p in node.points],
        "primitives": [
            {
                "kind": p.kind.value,
                "origin": [float(v) for v in p.origin],
                "axis": [float(v) for v in p.axis],
                "range": float(p.range),
            }
            for p in node.primitives
        ],
        "state": node.state.value,
    }


def save_json(graph: SceneGraph) -> bytes:
    doc = {
        "revision": graph.revision,
        "nodes": [_node_doc(graph.nodes[i]) for i in sorted(graph.nodes)],
        "edges": [
            {"from": e.from_id, "to": e.to_id, "relation": e.relation.value}
            for e in sorted(graph.edges)
        ],
    }
    return _fmt(doc).encode("ascii")


def _malformed(field_path: str):
    raise SceneGraphError(f"malformed scene graph: {field_path}")


def _float_vec(value, n: int, path: str) -> tuple[float, ...]:
    if not isinstance(value, list) or len(value) != n:
        _malformed(path)
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            _malformed(path)
        out.append(float(v))
    return tuple(out)


def _parse_node(doc, idx: int) -> ObjectNode:
    path = f"nodes[{idx}]"
    if not isinstance(doc, dict):
        _malformed(path)
    if not isinstance(doc.get("id"), int) or isinstance(doc.get("id"), bool) or doc["id"] < 0:
        _malformed(f"{path}.id")
    try:
        cls = SemanticClass(doc.get("class"))
    except ValueError:
        _malformed(f"{path}.class")
    pose_doc = doc.get("pose")
    if not isinstance(pose_doc, dict):
        _malformed(f"{path}.pose")
    try:
        pose = Pose(
            origin=_float_vec(pose_doc.get("origin"), 3, f"{path}.pose.origin"),
            normal=_float_vec(pose_doc.get("normal"), 3, f"{path}.pose.normal"),
        )
    except SceneGraphError as err:
        if "malformed" in str(err):
            raise
        _malformed(f"{path}.pose")
    points_doc = doc.get("points")
    if not isinstance(points_doc, list) or not points_doc:
        _malformed(f"{path}.points")
    points = tuple(_float_vec(p, 4, f"{path}.points[{k}]") for k, p in enumerate(points_doc))
    prim_doc = doc.get("primitives")
    if not isinstance(prim_doc, list):
        _malformed(f"{path}.primitives")
    primitives = []
    for k, p in enumerate(prim_doc):
        ppath = f"{path}.primitives[{k}]"
        if not isinstance(p, dict):
            _malformed(ppath)
        try:
            kind = PrimitiveKind(p.get("kind"))
        except ValueError:
            _malformed(f"{ppath}.kind")
        rng = p.get("range")
        if isinstance(rng, bool) or not isinstance(rng, (int, float)) or not math.isfinite(rng):
            _malformed(f"{ppath}.range")
        try:
            primitives.append(
                MotionPrimitive(
                    kind=kind,
                    origin=_float_vec(p.get("origin"), 3, f"{ppath}.origin"),
                    axis=_float_vec(p.get("axis"), 3, f"{ppath}.axis"),
                    range=float(rng),
                )
            )
        except SceneGraphError as err:
            if "malformed" in str(err):
                raise
            _malformed(ppath)
    try:
        state = NodeState(doc.get("state"))
    except ValueError:
        _malformed(f"{path}.state")
    try:
        return ObjectNode(
            id=doc["id"],
            semantic_class=cls,
            pose=pose,
            points=points,
            primitives=tuple(primitives),
            state=state,
        )
    except SceneGraphError:
        _malformed(f"{path}.state")


def load_json(data: bytes | str) -> SceneGraph:
    """Parse and validate a canonical scene-graph document."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError:
        _malformed("document")
    if not isinstance(doc, dict):
        _malformed("document")
    rev = doc.get("revision")
    if not isinstance(rev, int) or isinstance(rev, bool) or rev < 0:
        _malformed("revision")
    if not isinstance(doc.get("nodes"), list):
        _malformed("nodes")
    nodes: dict[int, ObjectNode] = {}
    for idx, node_doc in enumerate(doc["nodes"]):
        node = _parse_node(node_doc, idx)
        if node.id in nodes:
            _malformed(f"nodes[{idx}].id")
        nodes[node.id] = node
    if not isinstance(doc.get("edges"), list):
        _malformed("edges")
    edges = set()
    for idx, edge_doc in enumerate(doc["edges"]):
        path = f"edges[{idx}]"
        if not isinstance(edge_doc, dict):
            _malformed(path)
        src, dst = edge_doc.get("from"), edge_doc.get("to")
        if not isinstance(src, int) or isinstance(src, bool) or src not in nodes:
            _malformed(f"{path}.from")
        if not isinstance(dst, int) or isinstance(dst, bool) or dst not in nodes:
            _malformed(f"{path}.to")
        try:
            relation = Relation(edge_doc.get("relation"))
        except ValueError:
            _malformed(f"{path}.relation")
        if src == dst:
            _malformed(f"{path}.to")
        if relation == Relation.POWERS and (
            nodes[src].semantic_class != SemanticClass.LIGHT_SWITCH
            or nodes[dst].semantic_class != SemanticClass.LAMP
        ):
            _malformed(f"{path}.relation")
        edges.add(Edge(src, dst, relation))
    return SceneGraph(nodes=nodes, edges=frozenset(edges), revision=rev)
