// Wire types for the coordination server's HTTP+JSON endpoints.

export interface PoseDoc {
  origin: [number, number, number];
  normal: [number, number, number];
}

export interface PrimitiveDoc {
  kind: "translation" | "rotation" | "press";
  origin: [number, number, number];
  axis: [number, number, number];
  range: number;
}

export type NodeClass =
  | "drawer"
  | "swing_door"
  | "light_switch"
  | "lamp"
  | "movable"
  | "furniture"
  | "other";

export type NodeStateValue = "zero" | "one" | "none";

export interface NodeDoc {
  id: number;
  class: NodeClass;
  pose: PoseDoc;
  points: [number, number, number, number][];
  primitives: PrimitiveDoc[];
  state: NodeStateValue;
}

export interface EdgeDoc {
  from: number;
  to: number;
  relation: "spatial" | "powers";
}

export interface SceneDoc {
  revision: number;
  nodes: NodeDoc[];
  edges: EdgeDoc[];
}

export interface FeedEntry {
  seq: number;
  timestamp: number;
  kind: "state" | "link";
  object_id?: number;
  state?: 0 | 1;
  from?: number;
  to?: number;
}

export interface RobotStateDoc {
  battery: number;
  position: [number, number];
  heading: number;
  status: "IDLE" | "BUSY";
  timestamp: number;
}

export interface RobotInfoDoc {
  name: string;
  has_arm: boolean;
  has_basket: boolean;
  half_extents: [number, number];
}

export interface JobDoc {
  id: number;
  task_id: number;
  robot: string;
  action: string;
  target_object: number;
  role: string;
  params: Record<string, unknown>;
  status: "queued" | "assigned" | "running" | "done" | "failed";
  result: string | null;
}
