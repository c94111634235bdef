import { ApiClient, ApiError } from "./api.js";
import { renderLineChart } from "./chart.js";
import { ScenarioForm } from "./form.js";
import { renderMap } from "./map.js";
import { renderHistory, renderResult } from "./panels.js";
import { UiState } from "./state.js";
import { buildGrid, runSweep } from "./sweep.js";
import type { FieldError, SweepableField } from "./types.js";

export interface AppHandles {
  state: UiState;
  form: ScenarioForm;
  loadNetwork: () => Promise<void>;
  submitScenario: () => Promise<void>;
  sweep: (field: SweepableField, min: number, max: number, points: number) => Promise<void>;
  root: HTMLElement;
}

function section(root: HTMLElement, id: string, title: string): HTMLElement {
  const box = document.createElement("section");
  box.id = id;
  const heading = document.createElement("h2");
  heading.textContent = title;
  box.appendChild(heading);
  const body = document.createElement("div");
  body.className = "section-body";
  box.appendChild(body);
  root.appendChild(box);
  return body;
}

/**
 * Wire the whole client: map panel, scenario form, result + history panels,
 * and the sweep chart. Every number shown comes from a service response.
 */
export function initApp(root: HTMLElement, client: ApiClient): AppHandles {
  const state = new UiState();
  root.replaceChildren();

  const banner = document.createElement("div");
  banner.id = "banner";
  banner.className = "banner hidden";
  root.appendChild(banner);

  const mapBox = section(root, "map-panel", "flight network");
  const formBox = section(root, "scenario-panel", "what-if scenario");
  const resultBox = section(root, "result-panel", "prediction");
  const historyBox = section(root, "history-panel", "scenario history");
  const sweepBox = section(root, "sweep-panel", "parameter sweep");
  const chartBox = document.createElement("div");
  chartBox.id = "sweep-chart-box";

  const form = new ScenarioForm(() => void submitScenario());
  formBox.appendChild(form.element);

  async function loadNetwork(): Promise<void> {
    banner.className = "banner hidden";
    try {
      const net = await client.network();
      state.network = net;
      renderMap(mapBox, net, (origin, destination) => form.setRoute(origin, destination));
      if (net.nodes.length === 0) {
        const note = document.createElement("p");
        note.id = "empty-network-note";
        note.textContent = "the service returned an empty network";
        mapBox.appendChild(note);
      }
    } catch {
      banner.className = "banner error";
      banner.replaceChildren();
      banner.append("service unreachable ");
      const retry = document.createElement("button");
      retry.id = "retry-network";
      retry.textContent = "retry";
      retry.addEventListener("click", () => void loadNetwork());
      banner.appendChild(retry);
    }
  }

  async function submitScenario(): Promise<void> {
    form.clearErrors();
    const scenario = form.read();
    const token = state.predictGate.begin();
    try {
      const response = await client.predict(scenario);
      if (state.acceptPrediction(token, scenario, response)) {
        renderResult(resultBox, response);
        renderHistory(historyBox, state.history);
      }
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        const detail = err.detail;
        const errors: FieldError[] = Array.isArray(detail)
          ? (detail as FieldError[])
          : [{ field: "origin", message: String(detail) }];
        form.showErrors(errors);
      } else {
        banner.className = "banner error";
        banner.textContent = "prediction failed";
      }
    }
  }

  async function sweep(field: SweepableField, min: number, max: number, points: number): Promise<void> {
    const base = form.read();
    const token = state.sweepGate.begin();
    const grid = buildGrid(min, max, points);
    const result = await runSweep(client, base, field, grid);
    if (!state.sweepGate.isCurrent(token)) {
      return;
    }
    renderLineChart(chartBox, result.map((p) => ({ x: p.x, y: p.probability })), field);
  }

  // sweep controls
  const controls = document.createElement("div");
  controls.className = "sweep-controls";
  const fieldSel = document.createElement("select");
  fieldSel.id = "sweep-field";
  for (const name of [
    "visibility_m",
    "wind_speed_kt",
    "wind_dir_deg",
    "temperature_c",
    "cloud_cover_octas",
    "flight_hour",
  ]) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    fieldSel.appendChild(opt);
  }
  const minIn = document.createElement("input");
  minIn.id = "sweep-min";
  minIn.type = "number";
  minIn.value = "0";
  const maxIn = document.createElement("input");
  maxIn.id = "sweep-max";
  maxIn.type = "number";
  maxIn.value = "10000";
  const nIn = document.createElement("input");
  nIn.id = "sweep-points";
  nIn.type = "number";
  nIn.value = "25";
  const go = document.createElement("button");
  go.id = "sweep-run";
  go.textContent = "run sweep";
  go.addEventListener("click", () =>
    void sweep(
      fieldSel.value as SweepableField,
      Number(minIn.value),
      Number(maxIn.value),
      Math.max(1, Math.floor(Number(nIn.value))),
    ),
  );
  controls.append(fieldSel, minIn, maxIn, nIn, go);
  sweepBox.append(controls, chartBox);

  return { state, form, loadNetwork, submitScenario, sweep, root };
}
