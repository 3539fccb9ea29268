// Class-dependent state labels and per-class action menus. The action lists
// are the exact inverse of the server's action/class gates: a button exists
// iff the server would accept that action for the class.

import type { NodeClass, NodeStateValue } from "./types.js";

export function stateLabel(cls: NodeClass, state: NodeStateValue): string | null {
  if (state === "none") return null;
  if (cls === "drawer" || cls === "swing_door") return state === "zero" ? "open" : "closed";
  if (cls === "lamp") return state === "zero" ? "off" : "on";
  return null;
}

export function hoverText(cls: NodeClass, state: NodeStateValue): string {
  const label = stateLabel(cls, state);
  const name = cls.replace("_", " ");
  return label ? `${name} — ${label}` : name;
}

export const ACTIONS_BY_CLASS: Record<NodeClass, string[]> = {
  drawer: ["open", "close", "search_and_drop"],
  swing_door: ["open", "close", "search_and_drop"],
  light_switch: ["toggle_switch", "operate_and_check"],
  lamp: ["state_check"],
  movable: ["grasp", "fetch_and_drop"],
  furniture: [],
  other: [],
};

export const ACTION_TITLES: Record<string, string> = {
  open: "Open",
  close: "Close",
  toggle_switch: "Operate",
  grasp: "Grasp",
  state_check: "State check",
  fetch_and_drop: "Fetch & drop",
  search_and_drop: "Search & drop",
  operate_and_check: "Operate & check",
};

export function actionNeedsQuery(action: string): boolean {
  return action === "search_and_drop";
}
