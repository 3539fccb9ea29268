"""Scenario runner and operations CLI.

run       drive a scripted scenario headlessly (in-memory transport by
          default; --serve ADDR runs against a real socket server subprocess)
validate  cross-check scene/world/script files and print a violation report
serve     long-running interactive mode: HTTP API + live world for the
          browser console
serve-api internal: coordination server only (used by run --serve)
"""

from __future__ import annotations

import argparse
import subprocess
import sys
import threading
import time
from pathlib import Path

import httpx

from .scenario import (
    ScenarioError,
    agent_configs,
    build_world,
    load_scene_file,
    load_script_file,
    load_world_doc,
    robot_infos,
    validate_files,
)
from .agents import RobotAgent
from .server.api import create_app
from .server.core import CoordinationCore
from .sim import Simulation
from .transport import HttpClient, LocalClient
from . import world as sim_world


def _split_addr(addr: str) -> tuple[str, int]:
    host, _, port = addr.rpartition(":")
    return host or "127.0.0.1", int(port)


def _build_agents(doc, client, world, dump_grid=None):
    configs = agent_configs(doc, dump_grid_dir=dump_grid)
    names = [c.name for c in configs]
    agents = []
    for config in configs:
        peer = None
        if len(names) == 2:
            peer = names[1] if config.name == names[0] else names[0]
        agents.append(RobotAgent(config, client, world, peer=peer))
    return agents


def _wait_ready(base_url: str, timeout: float = 15.0) -> None:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        try:
            if httpx.get(f"{base_url}/robots", timeout=1.0).status_code == 200:
                return
        except httpx.HTTPError:
            pass
        time.sleep(0.05)
    raise RuntimeError(f"server at {base_url} did not become ready")


def cmd_validate(args) -> int:
    report = validate_files(args.scene, args.world, args.script)
    if report:
        for line in report:
            print(line, file=sys.stderr)
        return 2
    print("validation: ok")
    return 0


def cmd_run(args) -> int:
    report = validate_files(args.scene, args.world, args.script)
    if report:
        for line in report:
            print(line, file=sys.stderr)
        return 2
    scene = load_scene_file(args.scene)
    doc = load_world_doc(args.world)
    script = load_script_file(args.script)
    world = build_world(scene, doc, seed=args.seed)
    seed = world.seed

    server_proc = None
    if args.serve:
        host, port = _split_addr(args.serve)
        server_proc = subprocess.Popen(
            [
                sys.executable, "-m", "scenefleet.cli", "serve-api",
                "--scene", str(args.scene), "--world", str(args.world),
                "--addr", f"{host}:{port}",
            ],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        base_url = f"http://{host}:{port}"
        try:
            _wait_ready(base_url)
        except RuntimeError as err:
            server_proc.terminate()
            print(str(err), file=sys.stderr)
            return 2
        client = HttpClient(base_url)
    else:
        core = CoordinationCore(scene, robot_infos(doc))
        client = LocalClient(core)

    try:
        agents = _build_agents(doc, client, world, dump_grid=args.dump_grid)
        sim = Simulation(world, client, agents, script)
        sim.log.add(0.0, {"event": "run_started", "seed": seed, "duration": args.duration})
        sim.run(args.duration)
        statuses = sim.job_statuses()
        code = sim.exit_code()
    finally:
        client.close()
        if server_proc is not None:
            server_proc.terminate()
            server_proc.wait(timeout=10)

    if args.log:
        Path(args.log).write_bytes(sim.log.to_jsonl())
    done = sum(1 for s in statuses.values() if s == "done")
    failed = sum(1 for s in statuses.values() if s == "failed")
    other = len(statuses) - done - failed
    print(f"jobs: {done} done, {failed} failed, {other} unfinished, {sim.rejected} rejected")
    return code


def cmd_serve_api(args) -> int:
    import uvicorn

    scene = load_scene_file(args.scene)
    doc = load_world_doc(args.world)
    core = CoordinationCore(scene, robot_infos(doc))
    app = create_app(core)
    host, port = _split_addr(args.addr)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    report = validate_files(args.scene, args.world)
    if report:
        for line in report:
            print(line, file=sys.stderr)
        return 2
    scene = load_scene_file(args.scene)
    doc = load_world_doc(args.world)
    world = build_world(scene, doc, seed=args.seed)
    core = CoordinationCore(scene, robot_infos(doc))
    client = LocalClient(core)
    agents = _build_agents(doc, client, world)
    sim = Simulation(world, client, agents, script=[])

    stop = threading.Event()

    def _loop():
        # Wall-clock paced stepping so the console sees live motion.
        tick = 0
        while not stop.is_set():
            t = round(tick * sim.dt, 9)
            sim.t = t
            for agent in agents:
                agent.tick(t)
            sim_world.step(world, sim.dt)
            tick += 1
            time.sleep(sim.dt)

    thread = threading.Thread(target=_loop, daemon=True)
    thread.start()
    app = create_app(core)
    if args.ui:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=args.ui, html=True), name="ui")
    host, port = _split_addr(args.addr)
    print(f"serving on http://{host}:{port} (robots: {[r.name for r in core.robots()]})")
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    finally:
        stop.set()
        thread.join(timeout=2)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scenefleet")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scripted scenario headlessly")
    p_run.add_argument("--scene", required=True)
    p_run.add_argument("--world", required=True)
    p_run.add_argument("--script", required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--duration", type=float, default=120.0)
    p_run.add_argument("--serve", metavar="ADDR", default=None,
                       help="use a real socket server subprocess at HOST:PORT")
    p_run.add_argument("--dump-grid", metavar="DIR", default=None)
    p_run.add_argument("--log", metavar="FILE", default=None)
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="validate scenario files")
    p_val.add_argument("--scene", required=True)
    p_val.add_argument("--world", required=True)
    p_val.add_argument("--script", default=None)
    p_val.set_defaults(func=cmd_validate)

    p_serve = sub.add_parser("serve", help="interactive server + live world")
    p_serve.add_argument("--scene", required=True)
    p_serve.add_argument("--world", required=True)
    p_serve.add_argument("--addr", default="127.0.0.1:8750")
    p_serve.add_argument("--seed", type=int, default=None)
    p_serve.add_argument("--ui", metavar="DIR", default=None,
                         help="serve a built operator console from this directory")
    p_serve.set_defaults(func=cmd_serve)

    p_api = sub.add_parser("serve-api", help=argparse.SUPPRESS)
    p_api.add_argument("--scene", required=True)
    p_api.add_argument("--world", required=True)
    p_api.add_argument("--addr", required=True)
    p_api.set_defaults(func=cmd_serve_api)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as err:
        print(str(err), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
