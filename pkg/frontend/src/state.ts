// View model and pure reducer. Every mutation of the console's state funnels
// through apply(), so replaying the same inputs always rebuilds the same view.

import type { EdgeDoc, FeedEntry, JobDoc, NodeDoc, RobotStateDoc, SceneDoc } from "./types.js";

export type Mode = "day" | "night";

export interface RobotPanel {
  name: string;
  hasArm: boolean;
  hasBasket: boolean;
  state: RobotStateDoc | null;
}

export interface ViewModel {
  revision: number;
  nodes: Record<number, NodeDoc>;
  edges: EdgeDoc[];
  robots: Record<string, RobotPanel>;
  robotOrder: string[];
  cursors: Record<string, number>;
  jobs: Record<number, JobDoc>;
  deliveredItems: Record<number, string>; // movable node id -> receiving robot
  selection: number | null;
  hover: number | null;
  mode: Mode;
  colorByClass: boolean;
  connected: boolean;
  loaded: boolean;
}

export function initialView(mode: Mode = "day"): ViewModel {
  return {
    revision: 0,
    nodes: {},
    edges: [],
    robots: {},
    robotOrder: [],
    cursors: {},
    jobs: {},
    deliveredItems: {},
    selection: null,
    hover: null,
    mode,
    colorByClass: true,
    connected: false,
    loaded: false,
  };
}

export type Action =
  | { type: "scene_loaded"; scene: SceneDoc }
  | { type: "robots_listed"; robots: { name: string; has_arm: boolean; has_basket: boolean }[] }
  | { type: "feed_entry"; server: string; entry: FeedEntry }
  | { type: "robot_state"; name: string; state: RobotStateDoc }
  | { type: "jobs_update"; jobs: JobDoc[] }
  | { type: "hover"; id: number | null }
  | { type: "select"; id: number | null }
  | { type: "set_mode"; mode: Mode }
  | { type: "toggle_colors" }
  | { type: "connection"; ok: boolean };

export function apply(view: ViewModel, action: Action): ViewModel {
  switch (action.type) {
    case "scene_loaded": {
      const nodes: Record<number, NodeDoc> = {};
      for (const node of action.scene.nodes) nodes[node.id] = node;
      return {
        ...view,
        revision: action.scene.revision,
        nodes,
        edges: [...action.scene.edges],
        loaded: true,
        connected: true,
      };
    }
    case "robots_listed": {
      const robots = { ...view.robots };
      const order: string[] = [];
      for (const info of action.robots) {
        order.push(info.name);
        robots[info.name] = robots[info.name] ?? {
          name: info.name,
          hasArm: info.has_arm,
          hasBasket: info.has_basket,
          state: null,
        };
      }
      return { ...view, robots, robotOrder: order };
    }
    case "feed_entry": {
      const seen = view.cursors[action.server] ?? 0;
      if (action.entry.seq <= seen) return view; // already applied
      const cursors = { ...view.cursors, [action.server]: action.entry.seq };
      if (action.entry.kind === "state") {
        const node = view.nodes[action.entry.object_id!];
        if (!node) return { ...view, cursors };
        const updated: NodeDoc = { ...node, state: action.entry.state === 0 ? "zero" : "one" };
        return {
          ...view,
          cursors,
          revision: view.revision + 1,
          nodes: { ...view.nodes, [node.id]: updated },
        };
      }
      const from = action.entry.from!;
      const to = action.entry.to!;
      const exists = view.edges.some(
        (e) => e.relation === "powers" && e.from === from && e.to === to,
      );
      return {
        ...view,
        cursors,
        revision: view.revision + 1,
        edges: exists ? view.edges : [...view.edges, { from, to, relation: "powers" }],
      };
    }
    case "robot_state": {
      const panel = view.robots[action.name] ?? {
        name: action.name,
        hasArm: false,
        hasBasket: false,
        state: null,
      };
      return {
        ...view,
        robots: { ...view.robots, [action.name]: { ...panel, state: action.state } },
      };
    }
    case "jobs_update": {
      let changed = false;
      const jobs = { ...view.jobs };
      let delivered = view.deliveredItems;
      for (const job of action.jobs) {
        const prev = jobs[job.id];
        if (!prev || prev.status !== job.status || prev.result !== job.result) {
          jobs[job.id] = job;
          changed = true;
        }
        if (
          job.action === "fetch_and_drop" &&
          job.status === "done" &&
          job.role === "support" &&
          !(job.target_object in delivered)
        ) {
          delivered = { ...delivered, [job.target_object]: job.robot };
          changed = true;
        }
      }
      return changed ? { ...view, jobs, deliveredItems: delivered } : view;
    }
    case "hover":
      return view.hover === action.id ? view : { ...view, hover: action.id };
    case "select":
      return { ...view, selection: action.id };
    case "set_mode":
      return { ...view, mode: action.mode };
    case "toggle_colors":
      return { ...view, colorByClass: !view.colorByClass };
    case "connection":
      return view.connected === action.ok ? view : { ...view, connected: action.ok };
  }
}

export function applyAll(view: ViewModel, actions: Action[]): ViewModel {
  let current = view;
  for (const action of actions) current = apply(current, action);
  return current;
}

export function trayRows(view: ViewModel): JobDoc[] {
  return Object.values(view.jobs).sort((a, b) => b.id - a.id);
}
