/** Typed client for the planning service; the UI's only source of numbers. */

import type {
  ApiErrorBody,
  FieldPayload,
  OptimizeStatusPayload,
  Scenario,
  SweepPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly fieldPath?: string,
  ) {
    super(message);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(`${base}${path}`, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let body: ApiErrorBody | null = null;
    try {
      body = (await response.json()) as ApiErrorBody;
    } catch {
      // non-JSON error body
    }
    throw new ApiError(
      response.status,
      body?.code ?? "http_error",
      body?.message ?? `${response.status} ${response.statusText}`,
      body?.field_path,
    );
  }
  return (await response.json()) as T;
}

export class PlannerApi {
  constructor(public readonly base: string = "") {}

  postField(
    scenario: Scenario,
    overrides: { resolution_m?: number; threshold_db?: number } = {},
  ): Promise<FieldPayload> {
    return request<FieldPayload>(this.base, "/api/field", {
      method: "POST",
      body: JSON.stringify({ scenario, ...overrides }),
    });
  }

  postSweep(scenario: Scenario, kind: "wall" | "txrx", distances: number[]): Promise<SweepPayload> {
    return request<SweepPayload>(this.base, "/api/sweep", {
      method: "POST",
      body: JSON.stringify({ scenario, kind, distances }),
    });
  }

  async startOptimize(
    scenario: Scenario,
    objective: { leakage_penalty?: number; min_wall_clearance_m?: number; step_m?: number },
  ): Promise<string> {
    const body = await request<{ token: string }>(this.base, "/api/optimize", {
      method: "POST",
      body: JSON.stringify({ scenario, objective }),
    });
    return body.token;
  }

  pollOptimize(token: string): Promise<OptimizeStatusPayload> {
    return request<OptimizeStatusPayload>(this.base, `/api/optimize/${token}`);
  }

  listScenarios(): Promise<{ scenarios: { name: string; revision: number }[] }> {
    return request(this.base, "/api/scenarios");
  }

  getScenario(name: string): Promise<{ name: string; revision: number; scenario: Scenario }> {
    return request(this.base, `/api/scenarios/${name}`);
  }

  putScenario(
    name: string,
    scenario: Scenario,
    expectedRevision?: number,
  ): Promise<{ name: string; revision: number }> {
    return request(this.base, `/api/scenarios/${name}`, {
      method: "PUT",
      body: JSON.stringify(
        expectedRevision === undefined
          ? { scenario }
          : { scenario, expected_revision: expectedRevision },
      ),
    });
  }
}
