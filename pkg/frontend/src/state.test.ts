import { describe, expect, it } from "vitest";

import { apply, applyAll, initialView } from "./state.js";
import type { Action } from "./state.js";
import type { FeedEntry, SceneDoc } from "./types.js";

const SCENE: SceneDoc = {
  revision: 0,
  nodes: [
    {
      id: 1,
      class: "drawer",
      pose: { origin: [2, 5, 0.5], normal: [0, -1, 0] },
      points: [[2, 5, 0.5, 1]],
      primitives: [],
      state: "one",
    },
    {
      id: 2,
      class: "lamp",
      pose: { origin: [1, 1, 0.8], normal: [0, 0, 1] },
      points: [[1, 1, 0.8, 1]],
      primitives: [],
      state: "zero",
    },
    {
      id: 3,
      class: "light_switch",
      pose: { origin: [7.9, 2.5, 1.1], normal: [-1, 0, 0] },
      points: [[7.9, 2.5, 1.1, 1]],
      primitives: [],
      state: "none",
    },
  ],
  edges: [{ from: 1, to: 2, relation: "spatial" }],
};

function recordedFeed(count: number): Action[] {
  // Deterministic 50-change style feed alternating servers and objects.
  const actions: Action[] = [];
  const seqs: Record<string, number> = { alpha: 0, beta: 0 };
  for (let i = 0; i < count; i++) {
    const server = i % 2 === 0 ? "alpha" : "beta";
    const entry: FeedEntry =
      i % 7 === 6
        ? { seq: ++seqs[server], timestamp: i, kind: "link", from: 3, to: 2 }
        : {
            seq: ++seqs[server],
            timestamp: i,
            kind: "state",
            object_id: i % 3 === 0 ? 1 : 2,
            state: (i % 2) as 0 | 1,
          };
    actions.push({ type: "feed_entry", server, entry });
  }
  return actions;
}

describe("view model reducer", () => {
  it("replaying the same recorded feed yields an identical view", () => {
    const feed = recordedFeed(50);
    const base: Action[] = [{ type: "scene_loaded", scene: SCENE }];
    const a = applyAll(initialView(), [...base, ...feed]);
    const b = applyAll(initialView(), [...base, ...feed]);
    expect(a).toEqual(b);
  });

  it("view state is independent of interleaved local selection and mode", () => {
    const feed = recordedFeed(50);
    const base: Action[] = [{ type: "scene_loaded", scene: SCENE }];
    const plain = applyAll(initialView(), [...base, ...feed]);
    const noisy: Action[] = [];
    feed.forEach((action, i) => {
      noisy.push(action);
      if (i % 5 === 0) noisy.push({ type: "hover", id: 1 });
      if (i % 9 === 0) noisy.push({ type: "select", id: 2 });
    });
    let view = applyAll(initialView(), [...base, ...noisy]);
    view = apply(view, { type: "hover", id: null });
    view = apply(view, { type: "select", id: null });
    expect(view.nodes).toEqual(plain.nodes);
    expect(view.edges).toEqual(plain.edges);
    expect(view.cursors).toEqual(plain.cursors);
    expect(view.revision).toEqual(plain.revision);
  });

  it("drops already-seen sequence numbers", () => {
    let view = apply(initialView(), { type: "scene_loaded", scene: SCENE });
    const entry: FeedEntry = { seq: 1, timestamp: 0, kind: "state", object_id: 1, state: 0 };
    view = apply(view, { type: "feed_entry", server: "alpha", entry });
    const replayed = apply(view, { type: "feed_entry", server: "alpha", entry });
    expect(replayed).toBe(view); // cursor guard: no change at all
    expect(view.cursors.alpha).toBe(1);
  });

  it("cursor is monotone across entries", () => {
    let view = apply(initialView(), { type: "scene_loaded", scene: SCENE });
    for (const action of recordedFeed(30)) {
      const before = view.cursors[(action as { server: string }).server] ?? 0;
      view = apply(view, action);
      const after = view.cursors[(action as { server: string }).server] ?? 0;
      expect(after).toBeGreaterThanOrEqual(before);
    }
  });

  it("applies state changes with class-dependent meaning intact", () => {
    let view = apply(initialView(), { type: "scene_loaded", scene: SCENE });
    view = apply(view, {
      type: "feed_entry",
      server: "alpha",
      entry: { seq: 1, timestamp: 0, kind: "state", object_id: 1, state: 0 },
    });
    expect(view.nodes[1].state).toBe("zero"); // drawer open
    expect(view.nodes[2].state).toBe("zero"); // untouched lamp
  });

  it("deduplicates discovered powers links", () => {
    let view = apply(initialView(), { type: "scene_loaded", scene: SCENE });
    const link = (seq: number): Action => ({
      type: "feed_entry",
      server: "beta",
      entry: { seq, timestamp: 0, kind: "link", from: 3, to: 2 },
    });
    view = apply(view, link(1));
    view = apply(view, link(2));
    const powers = view.edges.filter((e) => e.relation === "powers");
    expect(powers).toEqual([{ from: 3, to: 2, relation: "powers" }]);
  });

  it("does not mutate its inputs", () => {
    const view = apply(initialView(), { type: "scene_loaded", scene: SCENE });
    const frozen = JSON.stringify(view);
    apply(view, {
      type: "feed_entry",
      server: "alpha",
      entry: { seq: 1, timestamp: 0, kind: "state", object_id: 1, state: 0 },
    });
    expect(JSON.stringify(view)).toBe(frozen);
  });

  it("marks delivered fetch items against the receiving robot", () => {
    let view = apply(initialView(), { type: "scene_loaded", scene: SCENE });
    view = apply(view, {
      type: "jobs_update",
      jobs: [
        {
          id: 2, task_id: 1, robot: "beta", action: "fetch_and_drop", target_object: 1,
          role: "support", params: {}, status: "done", result: "received",
        },
      ],
    });
    expect(view.deliveredItems).toEqual({ 1: "beta" });
  });
});
