// Thin fetch wrappers over the coordination server endpoints. The fetch
// implementation is injectable so tests can stub the network.

import type { FeedEntry, JobDoc, RobotInfoDoc, RobotStateDoc, SceneDoc } from "./types.js";

export type FetchFn = (input: string, init?: RequestInit) => Promise<Response>;

export class ServerClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchFn = (...args) => fetch(...args),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!resp.ok) throw new Error(`GET ${path}: ${resp.status}`);
    return (await resp.json()) as T;
  }

  async scene(): Promise<SceneDoc> {
    return this.get<SceneDoc>("/scene");
  }

  async robots(): Promise<RobotInfoDoc[]> {
    return this.get<RobotInfoDoc[]>("/robots");
  }

  async changes(robot: string, since: number): Promise<FeedEntry[]> {
    return this.get<FeedEntry[]>(`/robots/${robot}/object_changes?since=${since}`);
  }

  async robotState(robot: string): Promise<RobotStateDoc | null> {
    return this.get<RobotStateDoc | null>(`/robots/${robot}/state`);
  }

  async jobs(robot: string): Promise<JobDoc[]> {
    const body = await this.get<{ jobs: JobDoc[] }>(`/robots/${robot}/jobs`);
    return body.jobs;
  }

  async issueJob(
    via: string,
    action: string,
    target: number,
    params: Record<string, unknown> = {},
  ): Promise<JobDoc[]> {
    const resp = await this.fetchFn(`${this.baseUrl}/robots/${via}/jobs`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ action, target_object: target, params }),
    });
    if (!resp.ok) {
      let detail = `${resp.status}`;
      try {
        detail = String(((await resp.json()) as { detail?: string }).detail ?? detail);
      } catch {
        // keep the status code
      }
      throw new Error(detail);
    }
    return ((await resp.json()) as { jobs: JobDoc[] }).jobs;
  }
}
