import { readFileSync } from "node:fs";
import { resolve } from "node:path";

import type { EstimationConfigDto, JobDto } from "../src/types.js";

function load(name: string): unknown {
  // vitest runs with the package root as cwd; import.meta.url is rewritten
  // by the DOM environment, so resolve from cwd instead
  return JSON.parse(readFileSync(resolve("tests/fixtures", name), "utf-8"));
}

export const defaults = (): EstimationConfigDto =>
  JSON.parse(JSON.stringify(load("defaults.json"))) as EstimationConfigDto;

export const goldenPpcaJob = (): JobDto =>
  JSON.parse(JSON.stringify(load("golden_job_ppca.json"))) as JobDto;

export const goldenPpccaJob = (): JobDto =>
  JSON.parse(JSON.stringify(load("golden_job_ppcca.json"))) as JobDto;

export interface ParityCase {
  overlay: Record<string, unknown>;
  field: string;
}

export const parityCases = (): ParityCase[] =>
  (load("invalid_configs.json") as { cases: ParityCase[] }).cases;
