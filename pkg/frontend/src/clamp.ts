import type { ScenarioRequest } from "./types.js";

interface Limit {
  min: number;
  max: number;
  integer?: boolean;
}

/** Flight-record input ranges; no request leaves the client outside them. */
export const FIELD_LIMITS: Record<string, Limit> = {
  flight_hour: { min: 0, max: 23, integer: true },
  wind_dir_deg: { min: 0, max: 360 },
  wind_speed_kt: { min: 0, max: 250 },
  visibility_m: { min: 0, max: 20000 },
  temperature_c: { min: -90, max: 60 },
  cloud_cover_octas: { min: 0, max: 8 },
  fc_wind_dir_deg: { min: 0, max: 360 },
  fc_wind_speed_kt: { min: 0, max: 250 },
  fc_visibility_m: { min: 0, max: 20000 },
  fc_temperature_c: { min: -90, max: 60 },
};

export function clampField(name: string, value: number): number {
  const lim = FIELD_LIMITS[name];
  if (!lim || !Number.isFinite(value)) {
    return Number.isFinite(value) ? value : 0;
  }
  let v = Math.min(lim.max, Math.max(lim.min, value));
  if (lim.integer) {
    v = Math.round(v);
  }
  return v;
}

/** Clamp every numeric field of a scenario to its allowed range. */
export function clampScenario(req: ScenarioRequest): ScenarioRequest {
  const out: ScenarioRequest = { ...req };
  for (const name of Object.keys(FIELD_LIMITS)) {
    const key = name as keyof ScenarioRequest;
    const value = out[key];
    if (typeof value === "number") {
      (out as unknown as Record<string, number>)[name] = clampField(name, value);
    }
  }
  return out;
}
