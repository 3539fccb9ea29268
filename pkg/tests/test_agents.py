"""End-to-end agent behavior on the demo_room fixtures (in-memory transport)."""

import pytest

from scenefleet.scenegraph import NodeState, Relation
from scenefleet.server.core import JobAction
from scenefleet.world import InBasket, InGripper, RobotStatus

from conftest import run_demo


def job_events(sim, status=None):
    events = sim.log.filter("job_status")
    return [e for e in events if status is None or e.get("status") == status]


# -- single-robot tasks --------------------------------------------------------

def test_open_drawer_posts_change_and_updates_truth():
    sim, core, world = run_demo([{"at": 0.5, "action": "open", "target": 2}])
    assert sim.exit_code() == 0
    assert world.object_truth[2] == 0
    changes = sim.log.filter("object_change")
    assert [(c["object_id"], c["state"]) for c in changes] == [(2, 0)]
    assert core.scene_snapshot().nodes[2].state == NodeState.ZERO


def test_close_after_open_round_trips_truth():
    sim, core, world = run_demo([
        {"at": 0.5, "action": "open", "target": 2},
        {"at": 15.0, "action": "close", "target": 2},
    ])
    assert sim.exit_code() == 0
    assert world.object_truth[2] == 1
    assert [c["state"] for c in sim.log.filter("object_change")] == [0, 1]


def test_state_check_posts_observed_state():
    sim, core, world = run_demo([{"at": 0.5, "action": "state_check", "target": 6}])
    assert sim.exit_code() == 0
    changes = sim.log.filter("object_change")
    assert [(c["object_id"], c["state"]) for c in changes] == [(6, 0)]
    assert changes[0]["agent"] == "beta"  # observer robot runs state checks


def test_swing_door_open():
    sim, core, world = run_demo([{"at": 0.5, "action": "open", "target": 4}])
    assert sim.exit_code() == 0
    assert world.object_truth[4] == 0


def test_toggle_switch_flips_hidden_wiring_without_changes():
    sim, core, world = run_demo([{"at": 0.5, "action": "toggle_switch", "target": 5}])
    assert sim.exit_code() == 0
    assert world.object_truth[6] == 1 and world.object_truth[9] == 1
    assert world.object_truth[7] == 0  # unwired lamp untouched
    assert sim.log.filter("object_change") == []  # wiring is hidden from the robot


def test_grasp_leaves_item_in_gripper():
    sim, core, world = run_demo([{"at": 0.5, "action": "grasp", "target": 10}])
    assert sim.exit_code() == 0
    assert world.item_location[10] == InGripper("alpha")


def test_armless_agent_rejects_gripping_job():
    # Hand an arm-queue job to the armless agent directly: the capability
    # guard must fail it before any execution.
    sim, core, world = run_demo([], duration=1.0, stop_when_idle=False)
    jobs = core.enqueue(JobAction.GRASP, 10)
    job = core.next_job("alpha")
    beta = next(a for a in sim.agents if a.name == "beta")
    beta._start_job(job.to_dict())
    assert core.get_job(job.id).status.value == "failed"
    assert core.get_job(job.id).result == "requires arm"
    assert world.item_location[10] != InGripper("beta")


# -- busy span invariant ----------------------------------------------------------

def test_status_busy_for_entire_task_span():
    sim, core, world = run_demo([{"at": 0.5, "action": "open", "target": 2}])
    states = [e for e in sim.log.filter("robot_state") if e["agent"] == "alpha"]
    running = [e["t"] for e in job_events(sim, "running")]
    finished = [e["t"] for e in job_events(sim, "done")]
    start, end = running[0], finished[0]
    for e in states:
        if start <= e["t"] < end:
            assert e["status"] == "BUSY"
        elif e["t"] > end:
            assert e["status"] == "IDLE"


# -- fetch & drop ------------------------------------------------------------------

def test_fetch_and_drop_happy_path():
    sim, core, world = run_demo([{"at": 0.5, "action": "fetch_and_drop", "target": 10}])
    assert sim.exit_code() == 0
    assert world.item_location[10] == InBasket("beta")
    assert 10 in world.robots["beta"].basket
    relays = sim.log.filter("relay")
    order = [r["type"] for r in relays]
    assert order == ["rendezvous_request", "crouch_ready", "drop_done"]
    ready_t = next(r["t"] for r in relays if r["type"] == "crouch_ready")
    drop_t = sim.log.filter("drop")[0]["t"]
    assert ready_t <= drop_t
    assert world.robots["beta"].crouched is False  # stood back up


def test_fetch_rejected_when_support_busy():
    sim, core, world = run_demo([
        {"at": 0.5, "action": "state_check", "target": 6},       # keeps beta busy
        {"at": 1.0, "action": "fetch_and_drop", "target": 10},   # rejected
    ])
    rejected = sim.log.filter("job_rejected")
    assert len(rejected) == 1 and rejected[0]["error"] == "agents not available"
    assert sim.exit_code() == 1


def test_fetch_timeout_on_support_navigation_failure():
    sim, core, world = run_demo(
        [{"at": 0.5, "action": "fetch_and_drop", "target": 10}],
        duration=80.0,
        per_agent_overrides={"beta": {"fault_nav_failure": True}},
    )
    statuses = sim.job_statuses()
    assert set(statuses.values()) == {"failed"}
    # The arm agent still holds the item and both ended IDLE.
    assert world.item_location[10] == InGripper("alpha")
    assert world.robots["alpha"].status == RobotStatus.IDLE
    assert world.robots["beta"].status == RobotStatus.IDLE
    assert sim.log.filter("drop") == []


# -- search & drop ---------------------------------------------------------------------

def test_search_and_drop_hit_delivers_item():
    sim, core, world = run_demo(
        [{"at": 0.5, "action": "search_and_drop", "target": 2, "params": {"query_label": "mug"}}]
    )
    assert sim.exit_code() == 0
    assert world.item_location[11] == InBasket("beta")
    changes = [(c["object_id"], c["state"]) for c in sim.log.filter("object_change")]
    assert changes == [(2, 0)]  # opened; left open after the find
    assert world.object_truth[2] == 0


def test_search_and_drop_miss_recloses():
    sim, core, world = run_demo(
        [{"at": 0.5, "action": "search_and_drop", "target": 2, "params": {"query_label": "wrench"}}]
    )
    statuses = sim.job_statuses()
    assert set(statuses.values()) == {"done"}
    results = [e.get("result") for e in job_events(sim, "done")]
    assert results == ["not found", "not found"]
    changes = [(c["object_id"], c["state"]) for c in sim.log.filter("object_change")]
    assert changes == [(2, 0), (2, 1)]
    assert world.object_truth[2] == 1
    from scenefleet.world import InDrawer

    assert world.item_location[11] == InDrawer(2)  # mug untouched
    assert sim.log.filter("drop") == []


def test_search_swing_door_trace_equivalent_to_drawer_miss():
    sim_door, _, world_door = run_demo(
        [{"at": 0.5, "action": "search_and_drop", "target": 4, "params": {"query_label": "mug"}}]
    )
    assert set(sim_door.job_statuses().values()) == {"done"}
    changes = [(c["object_id"], c["state"]) for c in sim_door.log.filter("object_change")]
    assert changes == [(4, 0), (4, 1)]
    kinds = [e["kind"] for e in sim_door.log.filter("primitive")]
    assert kinds == ["rotation", "rotation"]  # drawer run uses translation instead


def test_search_auto_close_flag():
    sim, core, world = run_demo(
        [{"at": 0.5, "action": "search_and_drop", "target": 2, "params": {"query_label": "mug"}}],
        config_overrides={"auto_close_after_search": True},
    )
    assert sim.exit_code() == 0
    changes = [(c["object_id"], c["state"]) for c in sim.log.filter("object_change")]
    assert changes == [(2, 0), (2, 1)]
    assert world.object_truth[2] == 1


# -- operate & check ----------------------------------------------------------------------

def test_operate_and_check_discovers_exact_wiring():
    sim, core, world = run_demo(
        [{"at": 0.5, "action": "operate_and_check", "target": 5}], duration=150.0
    )
    assert sim.exit_code() == 0
    powers = {(e.from_id, e.to_id) for e in core.scene_snapshot().edges if e.relation == Relation.POWERS}
    assert powers == {(5, 6), (5, 9)}
    changes = {(c["object_id"], c["state"]) for c in sim.log.filter("object_change")}
    assert changes == {(6, 1), (9, 1)}
    assert world.object_truth[6] == 1 and world.object_truth[9] == 1


def test_operate_and_check_twice_is_involution():
    sim, core, world = run_demo(
        [
            {"at": 0.5, "action": "operate_and_check", "target": 5},
            {"at": 100.0, "action": "operate_and_check", "target": 5},
        ],
        duration=250.0,
    )
    assert sim.exit_code() == 0
    powers = {(e.from_id, e.to_id) for e in core.scene_snapshot().edges if e.relation == Relation.POWERS}
    assert powers == {(5, 6), (5, 9)}  # unchanged by the repeat
    assert world.object_truth[6] == 0 and world.object_truth[9] == 0  # toggled back
    mirror = core.scene_snapshot()
    assert mirror.nodes[6].state == NodeState.ZERO
    assert mirror.nodes[9].state == NodeState.ZERO


def test_operate_unwired_switch_reports_no_connections():
    # Rewire the world so the switch controls nothing.
    sim, core, world = run_demo([], duration=1.0, stop_when_idle=False)
    world.wiring[5] = set()
    from scenefleet.sim import ScriptEntry, Simulation

    sim2 = Simulation(world, sim.client, sim.agents,
                      [ScriptEntry(at=0.5, action="operate_and_check", target=5)])
    sim2.run(150.0, stop_when_idle=True)
    done = [e for e in sim2.log.filter("job_status") if e.get("status") == "done"]
    observer_result = next(e["result"] for e in done if e["agent"] == "beta")
    assert observer_result == "no connections found"
    assert not any(e.relation == Relation.POWERS for e in core.scene_snapshot().edges)


# -- capability routing invariant ------------------------------------------------------------

def test_no_gripping_subtask_on_armless_agent_over_job_mix():
    sim, core, world = run_demo(
        [
            {"at": 0.5, "action": "open", "target": 2},
            {"at": 12.0, "action": "state_check", "target": 7},
            {"at": 24.0, "action": "grasp", "target": 10},
            {"at": 40.0, "action": "close", "target": 2},
        ],
        duration=90.0,
    )
    assert sim.exit_code() == 0
    for e in sim.log.filter("job_status"):
        if e.get("status") == "assigned" and (
            e["action"] in ("open", "close", "toggle_switch", "grasp") or e.get("role") == "arm"
        ):
            assert e["agent"] == "alpha"
    # Primitives and grasps only ever executed by the arm robot.
    for e in sim.log.filter("primitive"):
        assert e["robot"] == "alpha"
    for e in sim.log.filter("grasp"):
        assert e["robot"] == "alpha"
