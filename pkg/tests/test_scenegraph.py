import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scenefleet.scenegraph import (
    Edge,
    MotionPrimitive,
    NodeState,
    ObjectChange,
    ObjectNode,
    Pose,
    PrimitiveKind,
    Relation,
    SceneGraph,
    SceneGraphError,
    SemanticClass,
    add_functional_link,
    apply_object_change,
    build_spatial_edges,
    interpret_state,
    load_json,
    save_json,
)

from conftest import mkgraph, mknode


# -- type invariants ---------------------------------------------------------

def test_pose_rejects_non_unit_normal():
    with pytest.raises(SceneGraphError):
        Pose(origin=(0, 0, 0), normal=(0.0, 0.0, 2.0))


def test_pose_rejects_non_finite_origin():
    with pytest.raises(SceneGraphError):
        Pose(origin=(math.inf, 0, 0), normal=(0.0, 0.0, 1.0))


def test_press_primitive_range_must_be_zero():
    with pytest.raises(SceneGraphError):
        MotionPrimitive(PrimitiveKind.PRESS, (0, 0, 0), (1.0, 0.0, 0.0), 0.2)


def test_stateful_class_requires_state():
    with pytest.raises(SceneGraphError):
        mknode(0, SemanticClass.DRAWER, state=NodeState.NONE)
    with pytest.raises(SceneGraphError):
        mknode(0, SemanticClass.LIGHT_SWITCH, state=NodeState.ONE)


def test_node_requires_points():
    with pytest.raises(SceneGraphError):
        ObjectNode(0, SemanticClass.OTHER, Pose((0, 0, 0), (0, 0, 1.0)), points=())


def test_powers_edge_classes_enforced_by_graph():
    nodes = [mknode(0, SemanticClass.LAMP), mknode(1, SemanticClass.LIGHT_SWITCH, at=(1, 0, 1))]
    with pytest.raises(SceneGraphError, match="invalid link endpoints"):
        mkgraph(nodes, edges={Edge(0, 1, Relation.POWERS)})


# -- build_spatial_edges -------------------------------------------------------

def test_edges_empty_graph_errors():
    with pytest.raises(SceneGraphError, match="empty graph"):
        build_spatial_edges({})


def test_edges_single_node_empty():
    assert build_spatial_edges({0: mknode(0)}) == frozenset()


def test_edges_three_collinear_nodes():
    nodes = {i: mknode(i, at=(x, 0.0, 0.5)) for i, x in enumerate([0.0, 1.0, 3.0])}
    edges = build_spatial_edges(nodes)
    assert edges == frozenset({Edge(0, 1, Relation.SPATIAL), Edge(1, 2, Relation.SPATIAL)})


def test_edges_tie_breaks_toward_lower_id():
    nodes = {
        0: mknode(0, at=(0.0, 0.0, 0.5)),
        1: mknode(1, at=(0.0, 2.0, 0.5)),
        2: mknode(2, at=(0.0, -2.0, 0.5)),
    }
    edges = build_spatial_edges(nodes)
    assert Edge(0, 1, Relation.SPATIAL) in edges
    assert Edge(0, 2, Relation.SPATIAL) in edges  # node 2's own nearest is 0


def _brute_force_nn_edges(nodes):
    """All-pairs oracle for the nearest-neighbor edge rule."""
    cents = {i: n.centroid() for i, n in nodes.items()}
    expected = set()
    for i in sorted(nodes):
        best, best_d = None, math.inf
        for j in sorted(nodes):
            if i == j:
                continue
            d = float(np.linalg.norm(cents[i] - cents[j]))
            if d < best_d:
                best, best_d = j, d
        expected.add((min(i, best), max(i, best)))
    return {Edge(a, b, Relation.SPATIAL) for a, b in expected}


def test_edges_match_brute_force_on_random_sets():
    rng = random.Random(42)
    for trial in range(30):
        count = rng.randint(2, 100)
        nodes = {}
        for i in range(count):
            x, y = rng.randint(-400, 400) / 10, rng.randint(-400, 400) / 10
            nodes[i] = mknode(i, at=(x, y, 0.5))
        assert build_spatial_edges(nodes) == _brute_force_nn_edges(nodes)


# -- apply_object_change ---------------------------------------------------------

def test_change_drawer_open(small_graph):
    g = apply_object_change(small_graph, ObjectChange(4, 0))
    assert g.nodes[4].state == NodeState.ZERO
    assert g.revision == small_graph.revision + 1


def test_change_lamp_on(small_graph):
    g = apply_object_change(small_graph, ObjectChange(1, 1))
    assert g.nodes[1].state == NodeState.ONE


def test_change_is_idempotent_but_bumps_revision(small_graph):
    g1 = apply_object_change(small_graph, ObjectChange(1, 1))
    g2 = apply_object_change(g1, ObjectChange(1, 1))
    assert g2.nodes[1].state == g1.nodes[1].state
    assert g2.revision == g1.revision + 1


def test_change_unknown_object(small_graph):
    with pytest.raises(SceneGraphError, match="no such object"):
        apply_object_change(small_graph, ObjectChange(99, 0))


def test_change_stateless_class(small_graph):
    with pytest.raises(SceneGraphError, match="object has no state"):
        apply_object_change(small_graph, ObjectChange(3, 0))


def test_change_touches_only_target_state(small_graph):
    g = apply_object_change(small_graph, ObjectChange(2, 1))
    assert g.edges == small_graph.edges
    for node_id in small_graph.nodes:
        before, after = small_graph.nodes[node_id], g.nodes[node_id]
        if node_id == 2:
            assert (after.pose, after.points, after.primitives, after.semantic_class) == (
                before.pose, before.points, before.primitives, before.semantic_class
            )
        else:
            assert after == before


# -- add_functional_link -------------------------------------------------------

def test_link_inserted_once(small_graph):
    g1 = add_functional_link(small_graph, 0, 1)
    g2 = add_functional_link(g1, 0, 1)
    powers = [e for e in g2.edges if e.relation == Relation.POWERS]
    assert powers == [Edge(0, 1, Relation.POWERS)]
    assert g2.revision == small_graph.revision + 2  # every mutation bumps


def test_link_direction_enforced(small_graph):
    with pytest.raises(SceneGraphError, match="invalid link endpoints"):
        add_functional_link(small_graph, 1, 0)


# -- interpret_state --------------------------------------------------------------

@pytest.mark.parametrize(
    "cls,state,label",
    [
        (SemanticClass.DRAWER, NodeState.ZERO, "open"),
        (SemanticClass.DRAWER, NodeState.ONE, "closed"),
        (SemanticClass.SWING_DOOR, NodeState.ZERO, "open"),
        (SemanticClass.SWING_DOOR, NodeState.ONE, "closed"),
        (SemanticClass.LAMP, NodeState.ZERO, "off"),
        (SemanticClass.LAMP, NodeState.ONE, "on"),
    ],
)
def test_interpret_state_labels(cls, state, label):
    assert interpret_state(cls, state) == label


def test_interpret_stateless_errors():
    with pytest.raises(SceneGraphError, match="stateless object"):
        interpret_state(SemanticClass.LIGHT_SWITCH, NodeState.NONE)


# -- canonical JSON -----------------------------------------------------------------

def test_round_trip_single_node():
    g = mkgraph([mknode(0)])
    data = save_json(g)
    assert save_json(load_json(data)) == data


def test_round_trip_preserves_structure(small_graph):
    g = load_json(save_json(small_graph))
    assert g.revision == small_graph.revision
    assert g.nodes == small_graph.nodes
    assert g.edges == small_graph.edges


def test_save_is_sorted_and_fixed_format(small_graph):
    text = save_json(small_graph).decode()
    assert text.index('"edges"') < text.index('"nodes"') < text.index('"revision"')
    assert "0.050000" in text  # 6-decimal floats


def test_malformed_edge_reference():
    g = mkgraph([mknode(0), mknode(1, at=(1, 0, 0.5))])
    doc = save_json(g).decode().replace('"to":1', '"to":99')
    with pytest.raises(SceneGraphError, match=r"malformed scene graph: edges\[0\].to"):
        load_json(doc)


def test_malformed_state_value():
    g = mkgraph([mknode(0)])
    doc = save_json(g).decode().replace('"state":"none"', '"state":"maybe"')
    with pytest.raises(SceneGraphError, match=r"malformed scene graph: nodes\[0\].state"):
        load_json(doc)


def test_malformed_missing_revision():
    with pytest.raises(SceneGraphError, match="malformed scene graph: revision"):
        load_json(b'{"nodes":[],"edges":[]}')


# Axis-aligned unit vectors and 2-decimal coordinates survive 6-decimal
# formatting exactly, so round-trip equality is exact for these graphs.
_UNITS = [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0), (0.0, -1.0, 0.0)]
_coord = st.integers(-500, 500).map(lambda v: v / 100)


@st.composite
def graphs(draw):
    n = draw(st.integers(1, 8))
    nodes = []
    for i in range(n):
        cls = draw(st.sampled_from(list(SemanticClass)))
        state = (
            draw(st.sampled_from([NodeState.ZERO, NodeState.ONE]))
            if cls in (SemanticClass.DRAWER, SemanticClass.SWING_DOOR, SemanticClass.LAMP)
            else NodeState.NONE
        )
        points = tuple(
            (draw(_coord), draw(_coord), draw(_coord), draw(_coord))
            for _ in range(draw(st.integers(1, 4)))
        )
        prims = tuple(
            MotionPrimitive(
                kind=draw(st.sampled_from([PrimitiveKind.TRANSLATION, PrimitiveKind.ROTATION])),
                origin=(draw(_coord), draw(_coord), draw(_coord)),
                axis=draw(st.sampled_from(_UNITS)),
                range=abs(draw(_coord)),
            )
            for _ in range(draw(st.integers(0, 2)))
        )
        nodes.append(
            ObjectNode(
                id=i,
                semantic_class=cls,
                pose=Pose(
                    origin=(draw(_coord), draw(_coord), draw(_coord)),
                    normal=draw(st.sampled_from(_UNITS)),
                ),
                points=points,
                primitives=prims,
                state=state,
            )
        )
    node_map = {node.id: node for node in nodes}
    edges = build_spatial_edges(node_map) if len(node_map) > 1 else frozenset()
    switches = [x.id for x in nodes if x.semantic_class == SemanticClass.LIGHT_SWITCH]
    lamps = [x.id for x in nodes if x.semantic_class == SemanticClass.LAMP]
    if switches and lamps and draw(st.booleans()):
        edges = edges | {Edge(switches[0], lamps[0], Relation.POWERS)}
    return SceneGraph(nodes=node_map, edges=frozenset(edges), revision=draw(st.integers(0, 9)))


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_round_trip_property(g):
    data = save_json(g)
    loaded = load_json(data)
    assert loaded == g
    assert save_json(loaded) == data  # canonical form is a fixed point


@settings(max_examples=30, deadline=None)
@given(graphs(), st.data())
def test_revision_strictly_monotone(g, data):
    statefuls = [n.id for n in g.nodes.values()
                 if n.semantic_class in (SemanticClass.DRAWER, SemanticClass.SWING_DOOR, SemanticClass.LAMP)]
    if not statefuls:
        return
    current = g
    for _ in range(4):
        target = data.draw(st.sampled_from(statefuls))
        state = data.draw(st.sampled_from([0, 1]))
        nxt = apply_object_change(current, ObjectChange(target, state))
        assert nxt.revision == current.revision + 1
        current = nxt
