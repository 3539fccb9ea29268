// 10 Hz polling loop: every tick, fetch feed entries past the per-server
// cursor from every robot's server, plus robot states and the job list, and
// apply them to the view model in seq order. A failed tick leaves the cursors
// untouched; the next tick retries and catches up.

import { ServerClient } from "./client.js";
import type { Action, ViewModel } from "./state.js";
import { apply } from "./state.js";

export const POLL_INTERVAL_MS = 100;

export class Poller {
  private timer: ReturnType<typeof setInterval> | null = null;
  private ticking = false;

  constructor(
    private readonly client: ServerClient,
    private view: ViewModel,
    private readonly onChange: (view: ViewModel) => void,
    private readonly intervalMs: number = POLL_INTERVAL_MS,
  ) {}

  current(): ViewModel {
    return this.view;
  }

  dispatch(action: Action): ViewModel {
    this.view = apply(this.view, action);
    this.onChange(this.view);
    return this.view;
  }

  start(): void {
    if (this.timer === null) {
      this.timer = setInterval(() => void this.tick(), this.intervalMs);
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async tick(): Promise<void> {
    if (this.ticking) return; // a slow previous tick is still in flight
    this.ticking = true;
    try {
      const actions: Action[] = [];
      for (const name of this.view.robotOrder) {
        const since = this.view.cursors[name] ?? 0;
        const entries = await this.client.changes(name, since);
        for (const entry of entries) actions.push({ type: "feed_entry", server: name, entry });
        const state = await this.client.robotState(name);
        if (state) actions.push({ type: "robot_state", name, state });
      }
      if (this.view.robotOrder.length > 0) {
        const jobs = await this.client.jobs(this.view.robotOrder[0]);
        actions.push({ type: "jobs_update", jobs });
      }
      actions.push({ type: "connection", ok: true });
      let next = this.view;
      for (const action of actions) next = apply(next, action);
      if (next !== this.view) {
        this.view = next;
        this.onChange(this.view);
      }
    } catch {
      this.dispatch({ type: "connection", ok: false });
    } finally {
      this.ticking = false;
    }
  }
}
