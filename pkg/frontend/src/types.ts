// Mirrors of the server's JSON wire types. The UI never computes statistics:
// every number it renders is read from one of these payload fields.

export type ModelKind = "ppca" | "ppcca" | "dppca";

export interface AnalysisModelDto {
  kind: ModelKind;
  q: number;
  n_covariates: number;
}

export interface PriorDto {
  loadings_mean: number[] | null;
  loadings_cov: number[][] | null;
  ig_shape: number;
  ig_scale: number;
  ppcca_coeff_sd: number;
  dppca_logvol_mean: number;
  dppca_logvol_sd: number;
}

export interface SourceDto {
  type: "prior_draws" | "fitted_pilot";
  prior?: PriorDto;
  model?: Record<string, unknown>;
}

export interface EstimationConfigDto {
  model: AnalysisModelDto;
  p: number;
  m: number;
  target_fdr: number;
  n_min: number;
  n_max: number;
  grid_step: number;
  group_ratio: [number, number];
  permutations: number;
  simulations: number;
  delta: number;
  seed: number;
  source: SourceDto;
  full_grid: boolean;
}

export interface CurvePointDto {
  n: number;
  n1: number;
  n2: number;
  fdr10: number;
  fdr50: number;
  fdr90: number;
}

export interface ResultDto {
  schema_version: number;
  n_hat: number | null;
  n1_hat: number | null;
  n2_hat: number | null;
  converged: boolean;
  no_estimate_reason: string | null;
  curve: CurvePointDto[];
  config: EstimationConfigDto;
  diagnostics: { grid_exhausted: boolean; seed: number; points_evaluated: number };
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface JobDto {
  id: string;
  state: JobState;
  progress: number;
  partial_curve: CurvePointDto[];
  result: ResultDto | null;
  error: string | null;
  submitted_at: string;
  finished_at: string | null;
  config: EstimationConfigDto;
}

export interface FieldError {
  field: string;
  message: string;
}

export function isTerminal(state: JobState): boolean {
  return state === "done" || state === "failed";
}
