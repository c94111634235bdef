import { ApiClient, ApiError } from "./api.js";
import type { PredictionResponse, ScenarioRequest, SweepableField } from "./types.js";

export interface SweepPoint {
  x: number;
  probability: number;
  response: PredictionResponse;
}

/** Evenly spaced grid, endpoints included. */
export function buildGrid(min: number, max: number, points: number): number[] {
  if (points < 1) {
    return [];
  }
  if (points === 1) {
    return [min];
  }
  const step = (max - min) / (points - 1);
  return Array.from({ length: points }, (_, i) => min + i * step);
}

async function simulateChunked(
  client: ApiClient,
  reqs: ScenarioRequest[],
): Promise<PredictionResponse[]> {
  try {
    return await client.simulate(reqs);
  } catch (err) {
    // batch cap exceeded: split and retry, order preserved
    if (err instanceof ApiError && err.status === 413 && reqs.length > 1) {
      const mid = Math.floor(reqs.length / 2);
      const head = await simulateChunked(client, reqs.slice(0, mid));
      const tail = await simulateChunked(client, reqs.slice(mid));
      return head.concat(tail);
    }
    throw err;
  }
}

/**
 * Probability curve over a grid of one numeric field, everything else held
 * at the base scenario. One /simulate round trip unless the cap forces
 * chunking.
 */
export async function runSweep(
  client: ApiClient,
  base: ScenarioRequest,
  field: SweepableField,
  grid: number[],
): Promise<SweepPoint[]> {
  const reqs = grid.map((v) => ({ ...base, [field]: v }));
  const responses = await simulateChunked(client, reqs);
  return responses.map((response, i) => ({
    x: grid[i]!,
    probability: response.holding_probability,
    response,
  }));
}
