// Client-side mirror of the server's config validation. Field names match the
// API's 400 responses exactly so inline messages and server errors line up;
// the parity fixture in tests/fixtures/invalid_configs.json is checked against
// both sides.

import type { EstimationConfigDto } from "./types.js";

export type ValidationErrors = Map<string, string>;

const KINDS = ["ppca", "ppcca", "dppca"];

function gcd(a: number, b: number): number {
  while (b !== 0) {
    [a, b] = [b, a % b];
  }
  return a;
}

export function reducedRatio(ratio: [number, number]): [number, number] {
  const g = gcd(Math.abs(ratio[0]), Math.abs(ratio[1])) || 1;
  return [ratio[0] / g, ratio[1] / g];
}

export function validateConfig(config: EstimationConfigDto): ValidationErrors {
  const errors: ValidationErrors = new Map();
  const err = (field: string, message: string) => {
    if (!errors.has(field)) errors.set(field, message);
  };

  const model = config.model;
  if (!KINDS.includes(model.kind)) {
    err("model.kind", `must be one of ${KINDS.join(", ")}`);
  }
  if (!Number.isFinite(model.q) || model.q < 1) {
    err("model.q", "latent dimension must be >= 1");
  }
  if (model.kind === "ppcca" && model.n_covariates < 1) {
    err("model.n_covariates", "ppcca requires at least one covariate");
  }
  if (model.kind !== "ppcca" && model.n_covariates !== 0) {
    err("model.n_covariates", "covariates only apply to ppcca");
  }

  if (!Number.isFinite(config.p) || config.p < 1) {
    err("p", "must be >= 1");
  }
  if (model.q >= config.p) {
    err("model.q", `latent dimension must be < p=${config.p}`);
  }
  if (!(config.m > 0 && config.m < 1)) {
    err("m", "must be in (0, 1)");
  } else if (config.m * config.p < 1) {
    err("m", "m*p must be >= 1");
  }
  if (!(config.target_fdr > 0 && config.target_fdr < 1)) {
    err("target_fdr", "must be in (0, 1)");
  }

  const [r1raw, r2raw] = config.group_ratio;
  if (!(r1raw >= 1 && r2raw >= 1)) {
    err("group_ratio", "both parts must be >= 1");
  } else {
    const [r1, r2] = reducedRatio(config.group_ratio);
    const d = r1 + r2;
    if (config.n_min < 4) {
      err("n_min", "must be >= 4");
    } else if (config.n_min % d !== 0) {
      err("n_min", `does not split by ratio ${r1}:${r2}`);
    } else if (Math.min((config.n_min / d) * r1, (config.n_min / d) * r2) < 2) {
      err("n_min", "smallest split leaves a group below 2 samples");
    }
    if (config.grid_step < 1) {
      err("grid_step", "must be >= 1");
    } else if (config.grid_step % d !== 0) {
      err("grid_step", `does not preserve ratio ${r1}:${r2}`);
    }
    if (config.n_max < config.n_min + 2 * config.grid_step) {
      err("n_max", `must be >= n_min + 2*grid_step = ${config.n_min + 2 * config.grid_step}`);
    }
  }

  if (config.permutations < 1) err("permutations", "must be >= 1");
  if (config.simulations < 1) err("simulations", "must be >= 1");
  if (!(config.delta > 0)) err("delta", "must be > 0");
  if (!Number.isInteger(config.seed)) err("seed", "must be an integer");

  return errors;
}
