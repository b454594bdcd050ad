// The study-configuration form. Fields mirror the server defaults; validation
// runs live through the same rules the API enforces, and an invalid form keeps
// the launch button disabled. A pilot CSV upload fits the chosen model
// server-side and pins the simulation source to the fitted parameters.

import type { ApiClient } from "./api.js";
import type { EstimationConfigDto, ModelKind } from "./types.js";
import { validateConfig } from "./validation.js";

interface FieldSpec {
  key: string;
  label: string;
  step?: string;
}

const NUMBER_FIELDS: FieldSpec[] = [
  { key: "p", label: "Spectral bins (p)" },
  { key: "m", label: "Expected significant proportion (m)", step: "0.01" },
  { key: "target_fdr", label: "Target FDR", step: "0.01" },
  { key: "n_min", label: "Minimum total sample size" },
  { key: "n_max", label: "Maximum total sample size" },
  { key: "grid_step", label: "Grid step" },
  { key: "model.q", label: "Latent dimension (q)" },
  { key: "model.n_covariates", label: "Covariates (ppcca)" },
  { key: "permutations", label: "Permutations (T)" },
  { key: "simulations", label: "Simulations per size" },
  { key: "delta", label: "Effect size (delta)", step: "0.1" },
  { key: "seed", label: "Seed" },
];

function getPath(config: EstimationConfigDto, key: string): number {
  const parts = key.split(".");
  let value: unknown = config;
  for (const part of parts) value = (value as Record<string, unknown>)[part];
  return value as number;
}

function setPath(config: EstimationConfigDto, key: string, value: number): void {
  const parts = key.split(".");
  let target: Record<string, unknown> = config as unknown as Record<string, unknown>;
  for (const part of parts.slice(0, -1)) target = target[part] as Record<string, unknown>;
  target[parts[parts.length - 1]] = value;
}

export interface ConfigForm {
  element: HTMLFormElement;
  readConfig(): EstimationConfigDto;
  /** Re-validate, paint inline errors, toggle the submit button; returns the error map. */
  refresh(): Map<string, string>;
}

export function buildConfigForm(
  defaults: EstimationConfigDto,
  api: ApiClient,
  onLaunch: (config: EstimationConfigDto) => void,
): ConfigForm {
  const config = JSON.parse(JSON.stringify(defaults)) as EstimationConfigDto;
  const form = document.createElement("form");
  form.className = "config-form";
  form.addEventListener("submit", (event) => event.preventDefault());

  const modelRow = document.createElement("div");
  modelRow.className = "field";
  const modelLabel = document.createElement("label");
  modelLabel.textContent = "Analysis model";
  const modelSelect = document.createElement("select");
  modelSelect.name = "model.kind";
  for (const kind of ["ppca", "ppcca", "dppca"]) {
    const opt = document.createElement("option");
    opt.value = kind;
    opt.textContent = kind;
    modelSelect.appendChild(opt);
  }
  modelSelect.value = config.model.kind;
  modelLabel.appendChild(modelSelect);
  modelRow.appendChild(modelLabel);
  form.appendChild(modelRow);

  const inputs = new Map<string, HTMLInputElement>();
  const errorSpans = new Map<string, HTMLElement>();

  for (const spec of NUMBER_FIELDS) {
    const row = document.createElement("div");
    row.className = "field";
    const label = document.createElement("label");
    label.textContent = spec.label;
    const input = document.createElement("input");
    input.type = "number";
    input.name = spec.key;
    if (spec.step) input.step = spec.step;
    input.value = String(getPath(config, spec.key));
    label.appendChild(input);
    row.appendChild(label);
    const error = document.createElement("span");
    error.className = "field-error";
    error.dataset.field = spec.key;
    row.appendChild(error);
    form.appendChild(row);
    inputs.set(spec.key, input);
    errorSpans.set(spec.key, error);
  }

  const modelError = document.createElement("span");
  modelError.className = "field-error";
  modelError.dataset.field = "model.kind";
  modelRow.appendChild(modelError);
  errorSpans.set("model.kind", modelError);

  // pilot upload -> server-side fit -> fixed-parameter simulation source
  const pilotRow = document.createElement("div");
  pilotRow.className = "field";
  const pilotLabel = document.createElement("label");
  pilotLabel.textContent = "Pilot CSV (optional)";
  const pilotInput = document.createElement("input");
  pilotInput.type = "file";
  pilotInput.name = "pilot";
  pilotInput.accept = ".csv,text/csv";
  pilotLabel.appendChild(pilotInput);
  pilotRow.appendChild(pilotLabel);
  const pilotStatus = document.createElement("span");
  pilotStatus.className = "pilot-status";
  pilotRow.appendChild(pilotStatus);
  form.appendChild(pilotRow);

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.className = "launch-button";
  submit.textContent = "Launch run";
  form.appendChild(submit);

  const readConfig = (): EstimationConfigDto => {
    config.model.kind = modelSelect.value as ModelKind;
    for (const [key, input] of inputs) {
      const parsed = input.value === "" ? NaN : Number(input.value);
      setPath(config, key, parsed);
    }
    if (config.model.kind !== "ppcca") config.model.n_covariates = 0;
    return JSON.parse(JSON.stringify(config)) as EstimationConfigDto;
  };

  const refresh = (): Map<string, string> => {
    const covariateInput = inputs.get("model.n_covariates")!;
    covariateInput.disabled = modelSelect.value !== "ppcca";
    const errors = validateConfig(readConfig());
    for (const [field, span] of errorSpans) {
      span.textContent = errors.get(field) ?? "";
    }
    submit.disabled = errors.size > 0;
    return errors;
  };

  form.addEventListener("input", () => refresh());
  modelSelect.addEventListener("change", () => refresh());

  pilotInput.addEventListener("change", async () => {
    const file = pilotInput.files?.[0];
    if (!file) return;
    pilotStatus.textContent = "Fitting pilot data...";
    try {
      const text = await file.text();
      const snapshot = readConfig();
      const fitted = await api.fitPilot(
        text,
        { label_column: "group", covariate_columns: snapshot.model.kind === "ppcca" ? ["weight"] : [] },
        snapshot.model.kind === "dppca" ? "ppca" : snapshot.model.kind,
        snapshot.model.q,
      );
      config.source = { type: "fitted_pilot", model: fitted };
      config.p = (fitted.mean as number[]).length;
      inputs.get("p")!.value = String(config.p);
      pilotStatus.textContent = `Fitted ${String(fitted.kind)} to ${config.p} bins; simulations use the fitted parameters.`;
      refresh();
    } catch (error) {
      pilotStatus.textContent = `Pilot fit failed: ${error instanceof Error ? error.message : String(error)}`;
    }
  });

  submit.addEventListener("click", (event) => {
    event.preventDefault();
    const errors = refresh();
    if (errors.size === 0) onLaunch(readConfig());
  });

  refresh();
  return { element: form, readConfig, refresh };
}
