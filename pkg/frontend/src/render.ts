// Top-down canvas renderer: node footprints from their point clouds (height
// colored, or class colored in "scene colors" mode), powers links, robots
// with heading wedges, plus hover/selection accents.

import type { NodeClass, NodeDoc } from "./types.js";
import type { Mode, ViewModel } from "./state.js";

export interface Palette {
  background: string;
  grid: string;
  text: string;
  robot: string;
  robotBusy: string;
  selection: string;
  powers: string;
  spatial: string;
  classColors: Record<NodeClass, string>;
}

export const DAY_PALETTE: Palette = {
  background: "#f4f2ec",
  grid: "#dcd8cc",
  text: "#222222",
  robot: "#2563eb",
  robotBusy: "#d97706",
  selection: "#16a34a",
  powers: "#ca8a04",
  spatial: "#c7c2b4",
  classColors: {
    drawer: "#b45309",
    swing_door: "#92400e",
    light_switch: "#7c3aed",
    lamp: "#eab308",
    movable: "#0891b2",
    furniture: "#57534e",
    other: "#a8a29e",
  },
};

export const NIGHT_PALETTE: Palette = {
  background: "#10141a",
  grid: "#1f2937",
  text: "#e5e7eb",
  robot: "#60a5fa",
  robotBusy: "#fbbf24",
  selection: "#4ade80",
  powers: "#facc15",
  spatial: "#374151",
  classColors: {
    drawer: "#f59e0b",
    swing_door: "#d97706",
    light_switch: "#a78bfa",
    lamp: "#fde047",
    movable: "#22d3ee",
    furniture: "#9ca3af",
    other: "#6b7280",
  },
};

export function paletteFor(mode: Mode): Palette {
  return mode === "day" ? DAY_PALETTE : NIGHT_PALETTE;
}

export function autoMode(hour: number): Mode {
  return hour >= 7 && hour < 19 ? "day" : "night";
}

export interface Viewport {
  scale: number; // pixels per meter
  offsetX: number;
  offsetY: number;
  height: number;
}

export function fitViewport(view: ViewModel, width: number, height: number): Viewport {
  let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
  for (const node of Object.values(view.nodes)) {
    for (const [x, y] of node.points) {
      if (x < minX) minX = x;
      if (x > maxX) maxX = x;
      if (y < minY) minY = y;
      if (y > maxY) maxY = y;
    }
  }
  if (!isFinite(minX)) {
    return { scale: 50, offsetX: 0, offsetY: 0, height };
  }
  const pad = 0.5;
  const scale = Math.min(
    width / (maxX - minX + 2 * pad),
    height / (maxY - minY + 2 * pad),
  );
  return {
    scale,
    offsetX: (minX - pad) * scale,
    offsetY: (minY - pad) * scale,
    height,
  };
}

export function toScreen(vp: Viewport, x: number, y: number): [number, number] {
  return [x * vp.scale - vp.offsetX, vp.height - (y * vp.scale - vp.offsetY)];
}

export function toWorld(vp: Viewport, px: number, py: number): [number, number] {
  return [(px + vp.offsetX) / vp.scale, (vp.height - py + vp.offsetY) / vp.scale];
}

export function nodeBounds(node: NodeDoc): [number, number, number, number] {
  let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
  for (const [x, y] of node.points) {
    if (x < minX) minX = x;
    if (x > maxX) maxX = x;
    if (y < minY) minY = y;
    if (y > maxY) maxY = y;
  }
  return [minX, minY, maxX, maxY];
}

const MIN_PICK_MARGIN = 0.12; // meters; tiny fixtures stay hoverable

export function hitTest(view: ViewModel, x: number, y: number): number | null {
  let best: number | null = null;
  let bestArea = Infinity;
  for (const node of Object.values(view.nodes)) {
    if (node.class === "other") continue; // walls are not interactable
    const [minX, minY, maxX, maxY] = nodeBounds(node);
    const m = MIN_PICK_MARGIN;
    if (x < minX - m || x > maxX + m || y < minY - m || y > maxY + m) continue;
    const area = (maxX - minX + 2 * m) * (maxY - minY + 2 * m);
    if (area < bestArea) {
      best = node.id;
      bestArea = area;
    }
  }
  return best;
}

export function hitTestRobot(view: ViewModel, x: number, y: number): string | null {
  for (const name of view.robotOrder) {
    const state = view.robots[name]?.state;
    if (!state) continue;
    const dx = x - state.position[0];
    const dy = y - state.position[1];
    if (Math.hypot(dx, dy) < 0.45) return name;
  }
  return null;
}

function heightColor(z: number, zMax: number, night: boolean): string {
  const t = Math.max(0, Math.min(1, zMax > 0 ? z / zMax : 0));
  const base = night ? 45 : 85;
  const l = base - t * (night ? -35 : 55);
  return `hsl(${210 - t * 160}, 60%, ${l}%)`;
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  view: ViewModel,
  vp: Viewport,
  width: number,
): void {
  const pal = paletteFor(view.mode);
  ctx.fillStyle = pal.background;
  ctx.fillRect(0, 0, width, vp.height);

  // meter grid
  ctx.strokeStyle = pal.grid;
  ctx.lineWidth = 1;
  const [wx0, wy1] = toWorld(vp, 0, 0);
  const [wx1, wy0] = toWorld(vp, width, vp.height);
  for (let gx = Math.floor(wx0); gx <= Math.ceil(wx1); gx++) {
    const [sx] = toScreen(vp, gx, 0);
    ctx.beginPath();
    ctx.moveTo(sx, 0);
    ctx.lineTo(sx, vp.height);
    ctx.stroke();
  }
  for (let gy = Math.floor(wy0); gy <= Math.ceil(wy1); gy++) {
    const [, sy] = toScreen(vp, 0, gy);
    ctx.beginPath();
    ctx.moveTo(0, sy);
    ctx.lineTo(width, sy);
    ctx.stroke();
  }

  let zMax = 0;
  for (const node of Object.values(view.nodes)) {
    for (const p of node.points) if (p[2] > zMax) zMax = p[2];
  }

  // powers links under the points
  for (const edge of view.edges) {
    if (edge.relation !== "powers") continue;
    const a = view.nodes[edge.from];
    const b = view.nodes[edge.to];
    if (!a || !b) continue;
    const [ax, ay] = toScreen(vp, a.pose.origin[0], a.pose.origin[1]);
    const [bx, by] = toScreen(vp, b.pose.origin[0], b.pose.origin[1]);
    ctx.strokeStyle = pal.powers;
    ctx.lineWidth = 2;
    ctx.setLineDash([6, 4]);
    ctx.beginPath();
    ctx.moveTo(ax, ay);
    ctx.lineTo(bx, by);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  const dotSize = Math.max(2, vp.scale * 0.06);
  for (const node of Object.values(view.nodes)) {
    const delivered = node.id in view.deliveredItems;
    const classColor = pal.classColors[node.class];
    for (const [x, y, z] of node.points) {
      const [sx, sy] = toScreen(vp, x, y);
      ctx.fillStyle = view.colorByClass ? classColor : heightColor(z, zMax, view.mode === "night");
      if (delivered) ctx.globalAlpha = 0.25; // item is riding in a basket now
      ctx.fillRect(sx - dotSize / 2, sy - dotSize / 2, dotSize, dotSize);
      ctx.globalAlpha = 1;
    }
    if (node.id === view.selection || node.id === view.hover) {
      const [minX, minY, maxX, maxY] = nodeBounds(node);
      const [sx0, sy0] = toScreen(vp, minX - 0.1, maxY + 0.1);
      const [sx1, sy1] = toScreen(vp, maxX + 0.1, minY - 0.1);
      ctx.strokeStyle = node.id === view.selection ? pal.selection : pal.text;
      ctx.lineWidth = node.id === view.selection ? 2.5 : 1;
      ctx.strokeRect(sx0, sy0, sx1 - sx0, sy1 - sy0);
    }
    const lampOn = node.class === "lamp" && node.state === "one";
    if (lampOn) {
      const [sx, sy] = toScreen(vp, node.pose.origin[0], node.pose.origin[1]);
      ctx.fillStyle = pal.powers;
      ctx.globalAlpha = 0.3;
      ctx.beginPath();
      ctx.arc(sx, sy, vp.scale * 0.45, 0, Math.PI * 2);
      ctx.fill();
      ctx.globalAlpha = 1;
    }
  }

  // robots: heading wedge + name + basket badge
  for (const name of view.robotOrder) {
    const panel = view.robots[name];
    const state = panel?.state;
    if (!state) continue;
    const [sx, sy] = toScreen(vp, state.position[0], state.position[1]);
    const r = vp.scale * 0.3;
    ctx.fillStyle = state.status === "BUSY" ? pal.robotBusy : pal.robot;
    ctx.beginPath();
    ctx.arc(sx, sy, r, 0, Math.PI * 2);
    ctx.fill();
    ctx.strokeStyle = pal.text;
    ctx.beginPath();
    ctx.moveTo(sx, sy);
    ctx.lineTo(
      sx + r * 1.4 * Math.cos(state.heading),
      sy - r * 1.4 * Math.sin(state.heading),
    );
    ctx.stroke();
    ctx.fillStyle = pal.text;
    ctx.font = "12px sans-serif";
    ctx.fillText(name, sx + r + 3, sy - 3);
    const carried = Object.entries(view.deliveredItems).filter(([, robot]) => robot === name);
    if (panel.hasBasket && carried.length > 0) {
      ctx.fillStyle = pal.classColors.movable;
      carried.forEach(([, _], i) => {
        ctx.beginPath();
        ctx.arc(sx - r / 2 + i * 6, sy + r / 2, 3, 0, Math.PI * 2);
        ctx.fill();
      });
    }
  }
}
