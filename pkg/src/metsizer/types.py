"""Domain types for pilot-data simulation, FDR estimation and the size search."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Optional, Union

import numpy as np

from .errors import ConfigError

MODEL_KINDS = ("ppca", "ppcca", "dppca")


@dataclass
class AnalysisModel:
    """The statistical model the practitioner intends to analyse the data with.

    kind          one of "ppca", "ppcca", "dppca"
    q             latent dimension (q < p for any data it is used with)
    n_covariates  number of covariates; required >= 1 exactly when kind == "ppcca"
    """

    kind: str = "ppca"
    q: int = 2
    n_covariates: int = 0

    def validate(self, prefix: str = "model") -> None:
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"{prefix}.kind", f"must be one of {MODEL_KINDS}, got {self.kind!r}")
        if self.q < 1:
            raise ConfigError(f"{prefix}.q", f"latent dimension must be >= 1, got {self.q}")
        if self.kind == "ppcca" and self.n_covariates < 1:
            raise ConfigError(
                f"{prefix}.n_covariates", "ppcca requires at least one covariate"
            )
        if self.kind != "ppcca" and self.n_covariates != 0:
            raise ConfigError(
                f"{prefix}.n_covariates", f"covariates only apply to ppcca, got {self.n_covariates}"
            )

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "q": self.q, "n_covariates": self.n_covariates}

    @staticmethod
    def from_json_dict(d: dict) -> "AnalysisModel":
        return AnalysisModel(
            kind=str(d.get("kind", "ppca")).lower(),
            q=int(d.get("q", 2)),
            n_covariates=int(d.get("n_covariates", 0)),
        )


@dataclass
class PriorSpec:
    """Hyperparameters of the generative priors used for pseudo-pilot simulation.

    ``loadings_mean`` / ``loadings_cov`` default to the q-dimensional zero vector
    and identity matrix when left as None.  The noise variance prior is
    IG(ig_shape, ig_scale); shape must exceed 2 so the prior variance is finite.
    """

    loadings_mean: Optional[np.ndarray] = None
    loadings_cov: Optional[np.ndarray] = None
    ig_shape: float = 3.0
    ig_scale: float = 4.0
    ppcca_coeff_sd: float = 1.0
    dppca_logvol_mean: float = math.log(2.0)
    dppca_logvol_sd: float = 1.0

    def validate(self, q: int, prefix: str = "prior") -> None:
        if self.ig_shape <= 2:
            raise ConfigError(f"{prefix}.ig_shape", f"must be > 2 for finite variance, got {self.ig_shape}")
        if self.ig_scale <= 0:
            raise ConfigError(f"{prefix}.ig_scale", f"must be > 0, got {self.ig_scale}")
        if self.ppcca_coeff_sd < 0:
            raise ConfigError(f"{prefix}.ppcca_coeff_sd", f"must be >= 0, got {self.ppcca_coeff_sd}")
        if self.dppca_logvol_sd < 0:
            raise ConfigError(f"{prefix}.dppca_logvol_sd", f"must be >= 0, got {self.dppca_logvol_sd}")
        if self.loadings_mean is not None and np.asarray(self.loadings_mean).shape != (q,):
            raise ConfigError(f"{prefix}.loadings_mean", f"must be a length-{q} vector")
        if self.loadings_cov is not None:
            cov = np.asarray(self.loadings_cov)
            if cov.shape != (q, q):
                raise ConfigError(f"{prefix}.loadings_cov", f"must be {q}x{q}")
            if not np.allclose(cov, cov.T):
                raise ConfigError(f"{prefix}.loadings_cov", "must be symmetric")

    def mean_vector(self, q: int) -> np.ndarray:
        if self.loadings_mean is None:
            return np.zeros(q)
        return np.asarray(self.loadings_mean, dtype=float)

    def cov_matrix(self, q: int) -> np.ndarray:
        if self.loadings_cov is None:
            return np.eye(q)
        return np.asarray(self.loadings_cov, dtype=float)

    def to_json_dict(self) -> dict:
        return {
            "loadings_mean": None if self.loadings_mean is None else np.asarray(self.loadings_mean).tolist(),
            "loadings_cov": None if self.loadings_cov is None else np.asarray(self.loadings_cov).tolist(),
            "ig_shape": float(self.ig_shape),
            "ig_scale": float(self.ig_scale),
            "ppcca_coeff_sd": float(self.ppcca_coeff_sd),
            "dppca_logvol_mean": float(self.dppca_logvol_mean),
            "dppca_logvol_sd": float(self.dppca_logvol_sd),
        }

    @staticmethod
    def from_json_dict(d: dict) -> "PriorSpec":
        lm = d.get("loadings_mean")
        lc = d.get("loadings_cov")
        return PriorSpec(
            loadings_mean=None if lm is None else np.asarray(lm, dtype=float),
            loadings_cov=None if lc is None else np.asarray(lc, dtype=float),
            ig_shape=float(d.get("ig_shape", 3.0)),
            ig_scale=float(d.get("ig_scale", 4.0)),
            ppcca_coeff_sd=float(d.get("ppcca_coeff_sd", 1.0)),
            dppca_logvol_mean=float(d.get("dppca_logvol_mean", math.log(2.0))),
            dppca_logvol_sd=float(d.get("dppca_logvol_sd", 1.0)),
        )


@dataclass(eq=False)
class PilotMatrix:
    """An n x p intensity matrix with two-group labels and optional covariates."""

    data: np.ndarray
    group: np.ndarray
    covariates: Optional[np.ndarray] = None
    provenance: str = "simulated"

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        self.group = np.asarray(self.group, dtype=int)
        if self.data.ndim != 2:
            raise ValueError(f"data must be 2-D, got shape {self.data.shape}")
        n = self.data.shape[0]
        if self.group.shape != (n,):
            raise ValueError(f"group labels must have length {n}, got {self.group.shape}")
        labels = set(np.unique(self.group).tolist())
        if not labels <= {1, 2}:
            raise ValueError(f"group labels must be in {{1, 2}}, got {sorted(labels)}")
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError(f"both groups need >= 2 samples, got n1={self.n1}, n2={self.n2}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("data contains non-finite entries")
        if self.covariates is not None:
            self.covariates = np.atleast_2d(np.asarray(self.covariates, dtype=float))
            if self.covariates.shape[0] != n:
                raise ValueError(
                    f"covariates must have {n} rows, got {self.covariates.shape[0]}"
                )
            if not np.all(np.isfinite(self.covariates)):
                raise ValueError("covariates contain non-finite entries")
        if self.provenance not in ("simulated", "experimental"):
            raise ValueError(f"provenance must be 'simulated' or 'experimental', got {self.provenance!r}")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]

    @property
    def n1(self) -> int:
        return int(np.sum(self.group == 1))

    @property
    def n2(self) -> int:
        return int(np.sum(self.group == 2))


@dataclass(eq=False)
class FittedModel:
    """Maximum-likelihood parameter estimates of a latent-variable model.

    ``coeffs`` (q x (c+1), intercept column first) and ``covariates`` (the raw
    n x c covariate rows kept for bootstrap resampling) are present for ppcca
    fits only.
    """

    kind: str
    q: int
    loadings: np.ndarray
    mean: np.ndarray
    noise_var: float
    coeffs: Optional[np.ndarray] = None
    covariates: Optional[np.ndarray] = None
    converged: bool = True
    n_iter: int = 0
    loglik: Optional[float] = None
    loglik_path: Optional[list] = None

    def __post_init__(self):
        self.loadings = np.asarray(self.loadings, dtype=float)
        self.mean = np.asarray(self.mean, dtype=float)
        if self.loadings.shape != (self.p, self.q):
            raise ValueError(
                f"loadings must be {self.p}x{self.q}, got {self.loadings.shape}"
            )
        if self.noise_var < 0:
            raise ValueError(f"noise_var must be >= 0, got {self.noise_var}")
        if self.coeffs is not None:
            self.coeffs = np.asarray(self.coeffs, dtype=float)
            if self.coeffs.shape[0] != self.q:
                raise ValueError(f"coeffs must have {self.q} rows, got {self.coeffs.shape}")
        if self.covariates is not None:
            self.covariates = np.atleast_2d(np.asarray(self.covariates, dtype=float))

    @property
    def p(self) -> int:
        return self.mean.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": self.kind,
            "q": int(self.q),
            "mean": [float(v) for v in self.mean],
            "loadings": [[float(v) for v in row] for row in self.loadings],
            "noise_var": float(self.noise_var),
            "coeffs": None if self.coeffs is None else [[float(v) for v in row] for row in self.coeffs],
            "covariates": None if self.covariates is None else [[float(v) for v in row] for row in self.covariates],
            "converged": bool(self.converged),
        }

    @staticmethod
    def from_json_dict(d: dict) -> "FittedModel":
        coeffs = d.get("coeffs")
        cov = d.get("covariates")
        return FittedModel(
            kind=str(d["kind"]),
            q=int(d["q"]),
            loadings=np.asarray(d["loadings"], dtype=float),
            mean=np.asarray(d["mean"], dtype=float),
            noise_var=float(d["noise_var"]),
            coeffs=None if coeffs is None else np.asarray(coeffs, dtype=float),
            covariates=None if cov is None else np.asarray(cov, dtype=float),
            converged=bool(d.get("converged", True)),
        )


@dataclass
class PriorDraws:
    """Simulation source: fresh parameter draws from the priors per dataset."""

    prior: PriorSpec = field(default_factory=PriorSpec)


@dataclass
class FittedPilot:
    """Simulation source: fixed parameters estimated from experimental pilot data."""

    fit: FittedModel


Source = Union[PriorDraws, FittedPilot]


class StatVector(NamedTuple):
    """Per-feature moderated statistics for one labelling of one dataset."""

    ts: np.ndarray
    pooled_se: np.ndarray
    cf: float


class PermutationNull(NamedTuple):
    """Statistics and pooled SEs for T label permutations (rows indexed by t)."""

    ts: np.ndarray
    pooled_se: np.ndarray


@dataclass
class FdrEstimate:
    """FDR estimates for one dataset: one value per permutation plus their median."""

    per_permutation: np.ndarray
    dataset_fdr: float
    n1: int
    n2: int
    p_o: int


@dataclass(frozen=True)
class FdrCurvePoint:
    """10th/50th/90th FDR percentiles across simulations at one candidate size."""

    n: int
    n1: int
    n2: int
    fdr10: float
    fdr50: float
    fdr90: float

    def to_json_dict(self) -> dict:
        return {
            "n": self.n, "n1": self.n1, "n2": self.n2,
            "fdr10": self.fdr10, "fdr50": self.fdr50, "fdr90": self.fdr90,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "FdrCurvePoint":
        return FdrCurvePoint(
            n=int(d["n"]), n1=int(d["n1"]), n2=int(d["n2"]),
            fdr10=float(d["fdr10"]), fdr50=float(d["fdr50"]), fdr90=float(d["fdr90"]),
        )


@dataclass(eq=False)
class EstimationConfig:
    """Everything a sample-size estimation run depends on.

    ``group_ratio`` is the n1:n2 split; candidate totals start at ``n_min`` and
    advance by ``grid_step`` up to ``n_max``.  ``permutations`` is the number of
    label permutations per dataset, ``simulations`` the number of pilot datasets
    per candidate size, and ``delta`` the planted effect size in within-group
    standard-deviation units.
    """

    model: AnalysisModel = field(default_factory=AnalysisModel)
    p: int = 200
    m: float = 0.2
    target_fdr: float = 0.05
    n_min: int = 4
    n_max: int = 200
    grid_step: int = 2
    group_ratio: tuple = (1, 1)
    permutations: int = 20
    simulations: int = 20
    delta: float = 2.3
    seed: int = 0
    source: Source = field(default_factory=PriorDraws)
    full_grid: bool = False

    def reduced_ratio(self) -> tuple:
        r1, r2 = (int(v) for v in self.group_ratio)
        g = math.gcd(r1, r2)
        return (r1 // g, r2 // g)

    def split_total(self, n: int) -> tuple:
        r1, r2 = self.reduced_ratio()
        d = r1 + r2
        if n % d != 0:
            raise ValueError(f"total n={n} does not split by ratio {r1}:{r2}")
        return (n // d * r1, n // d * r2)

    def validate(self) -> None:
        self.model.validate()
        if self.p < 1:
            raise ConfigError("p", f"must be >= 1, got {self.p}")
        if self.model.q >= self.p:
            raise ConfigError("model.q", f"latent dimension must be < p={self.p}, got {self.model.q}")
        if not (0.0 < self.m < 1.0):
            raise ConfigError("m", f"must be in (0, 1), got {self.m}")
        if self.m * self.p < 1.0:
            raise ConfigError("m", f"m*p must be >= 1, got {self.m * self.p}")
        if not (0.0 < self.target_fdr < 1.0):
            raise ConfigError("target_fdr", f"must be in (0, 1), got {self.target_fdr}")
        r1, r2 = (int(v) for v in self.group_ratio)
        if r1 < 1 or r2 < 1:
            raise ConfigError("group_ratio", f"both parts must be >= 1, got {self.group_ratio}")
        r1, r2 = self.reduced_ratio()
        d = r1 + r2
        if self.n_min < 4:
            raise ConfigError("n_min", f"must be >= 4, got {self.n_min}")
        if self.n_min % d != 0:
            raise ConfigError("n_min", f"{self.n_min} does not split by ratio {r1}:{r2}")
        n1, n2 = self.split_total(self.n_min)
        if min(n1, n2) < 2:
            raise ConfigError("n_min", f"smallest split {n1}:{n2} leaves a group below 2 samples")
        if self.grid_step < 1:
            raise ConfigError("grid_step", f"must be >= 1, got {self.grid_step}")
        if self.grid_step % d != 0:
            raise ConfigError("grid_step", f"{self.grid_step} does not preserve ratio {r1}:{r2}")
        if self.n_max < self.n_min + 2 * self.grid_step:
            raise ConfigError(
                "n_max", f"must be >= n_min + 2*grid_step = {self.n_min + 2 * self.grid_step}, got {self.n_max}"
            )
        if self.permutations < 1:
            raise ConfigError("permutations", f"must be >= 1, got {self.permutations}")
        if self.simulations < 1:
            raise ConfigError("simulations", f"must be >= 1, got {self.simulations}")
        if self.delta <= 0:
            raise ConfigError("delta", f"must be > 0, got {self.delta}")
        if isinstance(self.source, PriorDraws):
            self.source.prior.validate(self.model.q, prefix="source.prior")
        elif isinstance(self.source, FittedPilot):
            fit = self.source.fit
            if fit.p != self.p:
                raise ConfigError("p", f"must match the fitted model dimension {fit.p}, got {self.p}")
            if fit.kind == "ppcca" and fit.covariates is None:
                raise ConfigError("source.model", "ppcca fitted model is missing stored covariates")
        else:
            raise ConfigError("source", f"unknown source type {type(self.source).__name__}")

    def to_json_dict(self) -> dict:
        if isinstance(self.source, PriorDraws):
            source: dict = {"type": "prior_draws", "prior": self.source.prior.to_json_dict()}
        else:
            source = {"type": "fitted_pilot", "model": self.source.fit.to_json_dict()}
        return {
            "model": self.model.to_json_dict(),
            "p": int(self.p),
            "m": float(self.m),
            "target_fdr": float(self.target_fdr),
            "n_min": int(self.n_min),
            "n_max": int(self.n_max),
            "grid_step": int(self.grid_step),
            "group_ratio": [int(v) for v in self.group_ratio],
            "permutations": int(self.permutations),
            "simulations": int(self.simulations),
            "delta": float(self.delta),
            "seed": int(self.seed),
            "source": source,
            "full_grid": bool(self.full_grid),
        }

    @staticmethod
    def from_json_dict(d: dict) -> "EstimationConfig":
        defaults = EstimationConfig()
        src = d.get("source")
        if src is None:
            source: Source = PriorDraws()
        else:
            if not isinstance(src, dict):
                raise ConfigError("source", "must be an object")
            stype = src.get("type", "prior_draws")
            if stype == "prior_draws":
                prior = src.get("prior")
                source = PriorDraws(PriorSpec.from_json_dict(prior) if prior else PriorSpec())
            elif stype == "fitted_pilot":
                if "model" not in src or not isinstance(src["model"], dict):
                    raise ConfigError("source.model", "fitted_pilot source requires a model object")
                source = FittedPilot(FittedModel.from_json_dict(src["model"]))
            else:
                raise ConfigError("source.type", f"must be 'prior_draws' or 'fitted_pilot', got {stype!r}")
        model = d.get("model")
        ratio = d.get("group_ratio", list(defaults.group_ratio))
        try:
            return EstimationConfig(
                model=AnalysisModel.from_json_dict(model) if isinstance(model, dict) else AnalysisModel(),
                p=int(d.get("p", defaults.p)),
                m=float(d.get("m", defaults.m)),
                target_fdr=float(d.get("target_fdr", defaults.target_fdr)),
                n_min=int(d.get("n_min", defaults.n_min)),
                n_max=int(d.get("n_max", defaults.n_max)),
                grid_step=int(d.get("grid_step", defaults.grid_step)),
                group_ratio=tuple(int(v) for v in ratio),
                permutations=int(d.get("permutations", defaults.permutations)),
                simulations=int(d.get("simulations", defaults.simulations)),
                delta=float(d.get("delta", defaults.delta)),
                seed=int(d.get("seed", defaults.seed)),
                source=source,
                full_grid=bool(d.get("full_grid", False)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError("config", f"malformed field value: {exc}") from exc


@dataclass(eq=False)
class SampleSizeResult:
    """Outcome of a sample-size search: the estimate, the FDR curve, diagnostics.

    ``wall_time_s`` is informational and deliberately excluded from the
    serialized form so artifacts are byte-identical for identical (config, seed).
    """

    config: EstimationConfig
    curve: list
    n_hat: Optional[int]
    n1_hat: Optional[int]
    n2_hat: Optional[int]
    converged: bool
    no_estimate_reason: Optional[str] = None
    points_evaluated: int = 0
    grid_exhausted: bool = False
    wall_time_s: Optional[float] = None

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "n_hat": self.n_hat,
            "n1_hat": self.n1_hat,
            "n2_hat": self.n2_hat,
            "converged": bool(self.converged),
            "no_estimate_reason": self.no_estimate_reason,
            "curve": [pt.to_json_dict() for pt in self.curve],
            "config": self.config.to_json_dict(),
            "diagnostics": {
                "grid_exhausted": bool(self.grid_exhausted),
                "seed": int(self.config.seed),
                "points_evaluated": int(self.points_evaluated),
            },
        }

    @staticmethod
    def from_json_dict(d: dict) -> "SampleSizeResult":
        diag = d.get("diagnostics", {})
        return SampleSizeResult(
            config=EstimationConfig.from_json_dict(d.get("config", {})),
            curve=[FdrCurvePoint.from_json_dict(pt) for pt in d.get("curve", [])],
            n_hat=None if d.get("n_hat") is None else int(d["n_hat"]),
            n1_hat=None if d.get("n1_hat") is None else int(d["n1_hat"]),
            n2_hat=None if d.get("n2_hat") is None else int(d["n2_hat"]),
            converged=bool(d.get("converged", False)),
            no_estimate_reason=d.get("no_estimate_reason"),
            points_evaluated=int(diag.get("points_evaluated", 0)),
            grid_exhausted=bool(diag.get("grid_exhausted", False)),
        )
