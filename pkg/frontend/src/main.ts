// Console bootstrap: wires the canvas, popups, widgets, robot panels, job
// tray, and the keyboard command palette to the polling view model.

import { ServerClient } from "./client.js";
import { ACTIONS_BY_CLASS, ACTION_TITLES, actionNeedsQuery, hoverText } from "./labels.js";
import { Poller } from "./poller.js";
import {
  autoMode,
  drawScene,
  fitViewport,
  hitTest,
  hitTestRobot,
  paletteFor,
  toWorld,
} from "./render.js";
import { initialView, trayRows } from "./state.js";
import type { ViewModel } from "./state.js";

const qs = new URLSearchParams(location.search);
const baseUrl = qs.get("server") ?? `${location.protocol}//${location.host}`;
const client = new ServerClient(baseUrl);

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const popup = document.getElementById("popup")!;
const widget = document.getElementById("widget")!;
const banner = document.getElementById("banner")!;
const robotsPanel = document.getElementById("robots")!;
const trayPanel = document.getElementById("tray")!;
const palettePanel = document.getElementById("palette")!;

let renderQueued = false;

function queueRender(view: ViewModel): void {
  if (renderQueued) return;
  renderQueued = true;
  requestAnimationFrame(() => {
    renderQueued = false;
    render(view);
  });
}

const poller = new Poller(client, initialView(autoMode(new Date().getHours())), queueRender);

function render(view: ViewModel): void {
  const current = poller.current();
  document.body.dataset.mode = current.mode;
  banner.style.display = current.connected ? "none" : "block";
  const vp = fitViewport(current, canvas.width, canvas.height);
  drawScene(ctx, current, vp, canvas.width);
  renderRobots(current);
  renderTray(current);
}

function renderRobots(view: ViewModel): void {
  robotsPanel.innerHTML = "";
  for (const name of view.robotOrder) {
    const panel = view.robots[name];
    const el = document.createElement("div");
    el.className = "robot-card";
    const state = panel.state;
    const caps = [panel.hasArm ? "arm" : null, panel.hasBasket ? "basket" : null]
      .filter(Boolean)
      .join(", ");
    if (state) {
      const pct = Math.round(state.battery * 100);
      el.innerHTML =
        `<b>${name}</b> <span class="caps">(${caps})</span><br>` +
        `battery ${pct}% · ${state.status}<br>` +
        `at (${state.position[0].toFixed(2)}, ${state.position[1].toFixed(2)}) ` +
        `θ ${state.heading.toFixed(2)}`;
    } else {
      el.innerHTML = `<b>${name}</b> <span class="caps">(${caps})</span><br>no state yet`;
    }
    robotsPanel.appendChild(el);
  }
}

function renderTray(view: ViewModel): void {
  trayPanel.innerHTML = "";
  for (const job of trayRows(view).slice(0, 14)) {
    const el = document.createElement("div");
    el.className = `job job-${job.status}`;
    const title = ACTION_TITLES[job.action] ?? job.action;
    el.textContent =
      `#${job.id} ${title} → ${job.target_object} [${job.robot}/${job.role}] ` +
      `${job.status}${job.result ? `: ${job.result}` : ""}`;
    trayPanel.appendChild(el);
  }
}

function closeWidget(): void {
  widget.style.display = "none";
  poller.dispatch({ type: "select", id: null });
}

function openWidget(nodeId: number, atX: number, atY: number): void {
  const view = poller.dispatch({ type: "select", id: nodeId });
  const node = view.nodes[nodeId];
  if (!node) return;
  widget.innerHTML = "";
  const head = document.createElement("div");
  head.className = "widget-head";
  head.textContent = `#${node.id} ${hoverText(node.class, node.state)}`;
  widget.appendChild(head);
  const actions = ACTIONS_BY_CLASS[node.class];
  if (actions.length === 0) {
    const note = document.createElement("div");
    note.className = "widget-note";
    note.textContent = "no actions for this object";
    widget.appendChild(note);
  }
  for (const action of actions) {
    const btn = document.createElement("button");
    btn.textContent = ACTION_TITLES[action] ?? action;
    btn.onclick = async () => {
      const params: Record<string, unknown> = {};
      if (actionNeedsQuery(action)) {
        const query = prompt("search label:");
        if (query === null) return;
        params.query_label = query;
      }
      try {
        await client.issueJob(poller.current().robotOrder[0] ?? "", action, node.id, params);
        closeWidget();
      } catch (err) {
        showWidgetError(String((err as Error).message ?? err));
      }
    };
    widget.appendChild(btn);
  }
  widget.style.display = "block";
  widget.style.left = `${Math.min(atX, canvas.width - 180)}px`;
  widget.style.top = `${Math.min(atY, canvas.height - 140)}px`;
}

function openRobotWidget(name: string, atX: number, atY: number): void {
  const panel = poller.current().robots[name];
  widget.innerHTML = "";
  const head = document.createElement("div");
  head.className = "widget-head";
  head.textContent = name;
  widget.appendChild(head);
  const body = document.createElement("div");
  body.className = "widget-note";
  const state = panel?.state;
  body.textContent = state
    ? `battery ${(state.battery * 100).toFixed(0)}% · ${state.status} · ` +
      `(${state.position[0].toFixed(2)}, ${state.position[1].toFixed(2)})`
    : "no state posted yet";
  widget.appendChild(body);
  widget.style.display = "block";
  widget.style.left = `${atX}px`;
  widget.style.top = `${atY}px`;
}

function showWidgetError(message: string): void {
  const err = document.createElement("div");
  err.className = "widget-error";
  err.textContent = message;
  widget.appendChild(err);
}

canvas.addEventListener("mousemove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  const vp = fitViewport(poller.current(), canvas.width, canvas.height);
  const [wx, wy] = toWorld(vp, ev.clientX - rect.left, ev.clientY - rect.top);
  const hit = hitTest(poller.current(), wx, wy);
  poller.dispatch({ type: "hover", id: hit });
  if (hit !== null) {
    const node = poller.current().nodes[hit];
    popup.textContent = hoverText(node.class, node.state);
    popup.style.display = "block";
    popup.style.left = `${ev.clientX - rect.left + 14}px`;
    popup.style.top = `${ev.clientY - rect.top + 14}px`;
  } else {
    const robot = hitTestRobot(poller.current(), wx, wy);
    if (robot !== null) {
      const state = poller.current().robots[robot]?.state;
      popup.textContent = state
        ? `${robot} — battery ${(state.battery * 100).toFixed(0)}%, ${state.status}`
        : robot;
      popup.style.display = "block";
      popup.style.left = `${ev.clientX - rect.left + 14}px`;
      popup.style.top = `${ev.clientY - rect.top + 14}px`;
    } else {
      popup.style.display = "none";
    }
  }
});

canvas.addEventListener("click", (ev) => {
  const rect = canvas.getBoundingClientRect();
  const vp = fitViewport(poller.current(), canvas.width, canvas.height);
  const [wx, wy] = toWorld(vp, ev.clientX - rect.left, ev.clientY - rect.top);
  const hit = hitTest(poller.current(), wx, wy);
  if (hit !== null) {
    openWidget(hit, ev.clientX - rect.left, ev.clientY - rect.top);
    return;
  }
  const robot = hitTestRobot(poller.current(), wx, wy);
  if (robot !== null) {
    openRobotWidget(robot, ev.clientX - rect.left, ev.clientY - rect.top);
    return;
  }
  closeWidget(); // clicking empty space returns focus to the scene
});

// Command palette: keyboard stand-in for the voice verb set.
const COMMANDS: [string, () => void][] = [
  ["show scene", () => canvas.scrollIntoView()],
  ["toggle scene", () => poller.dispatch({ type: "toggle_colors" })],
  ["restart scene", () => void restartScene()],
  [
    "day/night mode",
    () =>
      poller.dispatch({
        type: "set_mode",
        mode: poller.current().mode === "day" ? "night" : "day",
      }),
  ],
  ["help", () => alert("hover to inspect, click to act; press / for commands")],
];

async function restartScene(): Promise<void> {
  try {
    const scene = await client.scene();
    poller.dispatch({ type: "scene_loaded", scene });
  } catch {
    poller.dispatch({ type: "connection", ok: false });
  }
}

function renderPalette(visible: boolean): void {
  palettePanel.style.display = visible ? "block" : "none";
  if (!visible) return;
  palettePanel.innerHTML = "";
  for (const [label, run] of COMMANDS) {
    const btn = document.createElement("button");
    btn.textContent = label;
    btn.onclick = () => {
      renderPalette(false);
      run();
    };
    palettePanel.appendChild(btn);
  }
}

document.addEventListener("keydown", (ev) => {
  if (ev.key === "/") {
    ev.preventDefault();
    renderPalette(palettePanel.style.display !== "block");
  } else if (ev.key === "Escape") {
    renderPalette(false);
    closeWidget();
  }
});

async function boot(): Promise<void> {
  try {
    const robots = await client.robots();
    poller.dispatch({ type: "robots_listed", robots });
    const scene = await client.scene();
    poller.dispatch({ type: "scene_loaded", scene });
  } catch {
    poller.dispatch({ type: "connection", ok: false });
    setTimeout(() => void boot(), 1000); // banner stays up until the server answers
    return;
  }
  poller.start();
}

void boot();
