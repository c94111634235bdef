import { clampScenario } from "./clamp.js";
import type { FieldError, ScenarioRequest } from "./types.js";

interface NumericFieldSpec {
  name: keyof ScenarioRequest & string;
  label: string;
  initial: number;
  step?: string;
}

const NUMERIC_FIELDS: NumericFieldSpec[] = [
  { name: "flight_hour", label: "flight hour", initial: 12 },
  { name: "wind_dir_deg", label: "wind direction (deg)", initial: 180 },
  { name: "wind_speed_kt", label: "wind speed (kt)", initial: 8 },
  { name: "visibility_m", label: "visibility (m)", initial: 9000 },
  { name: "temperature_c", label: "temperature (C)", initial: 22, step: "0.1" },
  { name: "cloud_cover_octas", label: "cloud cover (octas)", initial: 2 },
  { name: "fc_wind_dir_deg", label: "forecast wind dir (deg)", initial: 180 },
  { name: "fc_wind_speed_kt", label: "forecast wind speed (kt)", initial: 8 },
  { name: "fc_visibility_m", label: "forecast visibility (m)", initial: 9000 },
  { name: "fc_temperature_c", label: "forecast temperature (C)", initial: 22, step: "0.1" },
];

const FLAG_FIELDS: { name: "runway_head_change" | "runway_config_change"; label: string }[] = [
  { name: "runway_head_change", label: "runway head change" },
  { name: "runway_config_change", label: "runway configuration change" },
];

/** Scenario form: route + conditions, clamped to valid ranges on read. */
export class ScenarioForm {
  readonly element: HTMLFormElement;
  private readonly inputs = new Map<string, HTMLInputElement>();
  private readonly errorBoxes = new Map<string, HTMLElement>();

  constructor(private onSubmit: () => void) {
    this.element = document.createElement("form");
    this.element.className = "scenario-form";
    this.element.addEventListener("submit", (ev) => {
      ev.preventDefault();
      this.onSubmit();
    });

    for (const spec of [
      { name: "origin", label: "origin", initial: "" },
      { name: "destination", label: "destination", initial: "" },
    ]) {
      this.addInput(spec.name, spec.label, "text", String(spec.initial));
    }
    for (const spec of NUMERIC_FIELDS) {
      const input = this.addInput(spec.name, spec.label, "number", String(spec.initial));
      if (spec.step) {
        input.step = spec.step;
      }
    }
    for (const spec of FLAG_FIELDS) {
      this.addInput(spec.name, spec.label, "checkbox", "");
    }

    const submit = document.createElement("button");
    submit.type = "submit";
    submit.id = "scenario-submit";
    submit.textContent = "predict holding";
    this.element.appendChild(submit);
  }

  private addInput(name: string, label: string, type: string, value: string): HTMLInputElement {
    const wrap = document.createElement("label");
    wrap.className = "form-field";
    const caption = document.createElement("span");
    caption.textContent = label;
    const input = document.createElement("input");
    input.type = type;
    input.id = `scenario-${name}`;
    input.name = name;
    if (type !== "checkbox") {
      input.value = value;
    }
    const error = document.createElement("span");
    error.className = "field-error";
    error.id = `error-${name}`;
    wrap.append(caption, input, error);
    this.element.appendChild(wrap);
    this.inputs.set(name, input);
    this.errorBoxes.set(name, error);
    return input;
  }

  setRoute(origin: string, destination: string): void {
    this.inputs.get("origin")!.value = origin;
    this.inputs.get("destination")!.value = destination;
  }

  /** Current scenario, numeric fields clamped into range. */
  read(): ScenarioRequest {
    const num = (name: string) => Number(this.inputs.get(name)!.value);
    const raw: ScenarioRequest = {
      origin: this.inputs.get("origin")!.value.trim(),
      destination: this.inputs.get("destination")!.value.trim(),
      flight_hour: num("flight_hour"),
      wind_dir_deg: num("wind_dir_deg"),
      wind_speed_kt: num("wind_speed_kt"),
      visibility_m: num("visibility_m"),
      temperature_c: num("temperature_c"),
      cloud_cover_octas: num("cloud_cover_octas"),
      fc_wind_dir_deg: num("fc_wind_dir_deg"),
      fc_wind_speed_kt: num("fc_wind_speed_kt"),
      fc_visibility_m: num("fc_visibility_m"),
      fc_temperature_c: num("fc_temperature_c"),
      runway_head_change: this.inputs.get("runway_head_change")!.checked,
      runway_config_change: this.inputs.get("runway_config_change")!.checked,
    };
    return clampScenario(raw);
  }

  set(name: string, value: number | string | boolean): void {
    const input = this.inputs.get(name);
    if (!input) {
      return;
    }
    if (input.type === "checkbox") {
      input.checked = Boolean(value);
    } else {
      input.value = String(value);
    }
  }

  showErrors(errors: FieldError[]): void {
    this.clearErrors();
    for (const e of errors) {
      const box = this.errorBoxes.get(e.field);
      if (box) {
        box.textContent = e.message;
      }
    }
  }

  clearErrors(): void {
    for (const box of this.errorBoxes.values()) {
      box.textContent = "";
    }
  }
}
