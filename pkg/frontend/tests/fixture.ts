// In-process fixture server implementing the documented service contract:
// same endpoints, same JSON shapes, same error statuses, plus a
// deterministic prediction model tests can evaluate independently.

import type {
  EdgeFeatures,
  NetworkResponse,
  PredictionResponse,
  ScenarioRequest,
} from "../src/types.js";

function feat(b: number, f: number, c: number, ds: number, dd: number, g: number): EdgeFeatures {
  return {
    betweenness: b,
    flow_betweenness: f,
    edge_connectivity: c,
    dd_src: ds,
    dd_dst: dd,
    google_entry: g,
  };
}

export const FIXTURE_NETWORK: NetworkResponse = {
  nodes: [
    { code: "SBMG", lat: -19.9, lon: -43.9, alt: 850 },
    { code: "SBRJ", lat: -22.9, lon: -43.2, alt: 5 },
    { code: "SBSP", lat: -23.5, lon: -46.6, alt: 800 },
  ],
  edges: [
    { src: "SBMG", dst: "SBSP", weight: 2, features: feat(2, 0.2, 2, -1, 3, 0.47) },
    { src: "SBRJ", dst: "SBSP", weight: 4, features: feat(3, 0.3, 4, -2, 3, 0.55) },
    { src: "SBSP", dst: "SBRJ", weight: 5, features: feat(4, 0.4, 5, 3, -2, 0.62) },
  ],
};

const RANGES: Record<string, [number, number]> = {
  flight_hour: [0, 23],
  wind_dir_deg: [0, 360],
  wind_speed_kt: [0, Infinity],
  visibility_m: [0, Infinity],
  cloud_cover_octas: [0, 8],
  fc_wind_dir_deg: [0, 360],
  fc_wind_speed_kt: [0, Infinity],
  fc_visibility_m: [0, Infinity],
};

function sigmoid(z: number): number {
  return 1 / (1 + Math.exp(-z));
}

const routes = new Map(FIXTURE_NETWORK.edges.map((e) => [`${e.src}->${e.dst}`, e]));

/** The fixture's model: a fixed logistic scorer over the scenario inputs. */
export function fixtureModel(req: ScenarioRequest): PredictionResponse {
  const edge = routes.get(`${req.origin}->${req.destination}`);
  const congestion = edge ? edge.weight / 5 : 0;
  const z =
    2.2 * ((6000 - req.visibility_m) / 6000) +
    0.06 * req.wind_speed_kt +
    0.9 * (req.runway_head_change ? 1 : 0) +
    0.5 * (req.runway_config_change ? 1 : 0) +
    1.1 * congestion -
    2.0;
  const probability = sigmoid(z);
  return {
    request_id: req.request_id ?? null,
    holding_probability: probability,
    predicted_delay_s: Math.max(0, 1800 * probability - 60),
    model_versions: { classifier: "fixture", regressor: "fixture" },
    unseen_route: !edge,
    graph_features_used: edge ? edge.features : null,
  };
}

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function validate(req: ScenarioRequest): Response | null {
  const fieldErrors: { field: string; message: string }[] = [];
  for (const [field, [lo, hi]] of Object.entries(RANGES)) {
    const v = (req as unknown as Record<string, number>)[field];
    if (typeof v !== "number" || Number.isNaN(v) || v < lo || v > hi) {
      fieldErrors.push({ field, message: `value out of range [${lo}, ${hi}]` });
    }
  }
  if (fieldErrors.length) {
    return json({ detail: fieldErrors }, 422);
  }
  const known = new Set(FIXTURE_NETWORK.nodes.map((n) => n.code));
  for (const code of [req.origin, req.destination]) {
    if (!known.has(code)) {
      return json({ detail: `unknown airport '${code}'` }, 422);
    }
  }
  return null;
}

export interface FixtureOptions {
  simulateCap?: number;
  network?: NetworkResponse;
  failNetwork?: boolean;
}

export interface FixtureServer {
  fetch: typeof fetch;
  calls: { predict: number; simulate: number; network: number };
}

/** fetch-compatible handler backed by the fixture model. */
export function makeFixtureServer(opts: FixtureOptions = {}): FixtureServer {
  const cap = opts.simulateCap ?? 10_000;
  const network = opts.network ?? FIXTURE_NETWORK;
  const calls = { predict: 0, simulate: 0, network: 0 };

  const handler = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    if (path === "/health") {
      return json({ status: "ok", model_versions: { classifier: "fixture", regressor: "fixture" } });
    }
    if (path === "/network") {
      calls.network += 1;
      if (opts.failNetwork) {
        return new Response("boom", { status: 503 });
      }
      return json(network);
    }
    let body: unknown;
    try {
      body = JSON.parse(String(init?.body ?? ""));
    } catch {
      return json({ detail: "malformed JSON body" }, 400);
    }
    if (path === "/predict") {
      calls.predict += 1;
      const req = body as ScenarioRequest;
      return validate(req) ?? json(fixtureModel(req));
    }
    if (path === "/simulate") {
      calls.simulate += 1;
      const reqs = body as ScenarioRequest[];
      if (reqs.length > cap) {
        return json({ detail: `batch of ${reqs.length} exceeds cap ${cap}` }, 413);
      }
      const out: PredictionResponse[] = [];
      for (const r of reqs) {
        const bad = validate(r);
        if (bad) {
          return bad;
        }
        out.push(fixtureModel(r));
      }
      return json(out);
    }
    return new Response("not found", { status: 404 });
  };
  return { fetch: handler as typeof fetch, calls };
}
