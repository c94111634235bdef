import type { NetworkResponse, PredictionResponse, ScenarioRequest } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(`service responded ${status}`);
  }
}

/** Thin typed client; every displayed number originates from these calls. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!res.ok) {
      let detail: unknown = null;
      try {
        detail = (await res.json()).detail;
      } catch {
        // non-JSON error body; status alone is enough
      }
      throw new ApiError(res.status, detail);
    }
    return res.json() as Promise<T>;
  }

  health(): Promise<{ status: string; model_versions: Record<string, string> }> {
    return this.request("/health");
  }

  network(): Promise<NetworkResponse> {
    return this.request("/network");
  }

  predict(req: ScenarioRequest): Promise<PredictionResponse> {
    return this.request("/predict", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  simulate(reqs: ScenarioRequest[]): Promise<PredictionResponse[]> {
    return this.request("/simulate", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(reqs),
    });
  }
}
