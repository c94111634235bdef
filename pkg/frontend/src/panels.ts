import type { HistoryEntry } from "./state.js";
import type { PredictionResponse } from "./types.js";

/** Probability gauge: fixed-width bar plus the exact service value. */
export function renderGauge(container: HTMLElement, probability: number): void {
  container.replaceChildren();
  const bar = document.createElement("div");
  bar.className = "gauge";
  const fill = document.createElement("div");
  fill.className = "gauge-fill";
  fill.style.width = `${(probability * 100).toFixed(1)}%`;
  bar.appendChild(fill);
  const value = document.createElement("span");
  value.className = "gauge-value";
  value.id = "probability-value";
  value.textContent = probability.toFixed(4);
  container.append(bar, value);
}

/** Last prediction: gauge, delay, graph features, unseen-route badge. */
export function renderResult(container: HTMLElement, res: PredictionResponse): void {
  container.replaceChildren();
  const gaugeBox = document.createElement("div");
  renderGauge(gaugeBox, res.holding_probability);
  container.appendChild(gaugeBox);

  const delay = document.createElement("p");
  delay.id = "predicted-delay";
  delay.textContent = `predicted holding: ${res.predicted_delay_s.toFixed(0)} s`;
  container.appendChild(delay);

  if (res.unseen_route) {
    const badge = document.createElement("span");
    badge.className = "badge-unseen";
    badge.textContent = "route not in training network";
    container.appendChild(badge);
  } else if (res.graph_features_used) {
    const list = document.createElement("dl");
    list.className = "graph-features";
    for (const [key, value] of Object.entries(res.graph_features_used)) {
      const dt = document.createElement("dt");
      dt.textContent = key;
      const dd = document.createElement("dd");
      dd.textContent = typeof value === "number" ? value.toPrecision(4) : String(value);
      list.append(dt, dd);
    }
    container.appendChild(list);
  }
}

/** Side-by-side history so consecutive what-ifs can be compared. */
export function renderHistory(container: HTMLElement, entries: HistoryEntry[]): void {
  container.replaceChildren();
  for (const entry of [...entries].reverse()) {
    const card = document.createElement("div");
    card.className = "history-card";
    const route = document.createElement("strong");
    route.textContent = `${entry.scenario.origin} -> ${entry.scenario.destination}`;
    const conditions = document.createElement("small");
    conditions.textContent =
      `vis ${entry.scenario.visibility_m} m, wind ${entry.scenario.wind_speed_kt} kt, ` +
      `hour ${entry.scenario.flight_hour}`;
    const prob = document.createElement("span");
    prob.className = "history-probability";
    prob.textContent = entry.response.holding_probability.toFixed(4);
    card.append(route, conditions, prob);
    if (entry.response.unseen_route) {
      const badge = document.createElement("span");
      badge.className = "badge-unseen";
      badge.textContent = "unseen route";
      card.appendChild(badge);
    }
    container.appendChild(card);
  }
}
