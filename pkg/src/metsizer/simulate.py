"""Pseudo-pilot data simulators.

Each simulator draws model parameters from their priors and then generates an
n x p intensity matrix from the corresponding latent-variable model; the data
are exchangeable under the two-group null, so the first n1 rows get label 1
and the rest label 2.  The per-feature mean is fixed at zero: the two-sample
statistic is location-invariant per feature, so a mean term would cancel.

Reproducibility contract: every simulator derives one child stream per draw
component (loadings, scores, variance, noise, ...) in a fixed order via
``rng.spawn``.  Models sharing a component therefore produce bit-identical
draws for it under a matched seed, which the reduction tests rely on.
"""

from __future__ import annotations

import numpy as np

from .sampling import draw_gaussian_matrix, draw_inverse_gamma
from .types import AnalysisModel, FittedModel, PilotMatrix, PriorSpec


def _group_labels(n1: int, n2: int) -> np.ndarray:
    return np.concatenate([np.ones(n1, dtype=int), np.full(n2, 2, dtype=int)])


def _check_sizes(n1: int, n2: int, p: int, q: int) -> None:
    if n1 < 2 or n2 < 2:
        raise ValueError(f"group sizes must be >= 2, got n1={n1}, n2={n2}")
    if p <= q:
        raise ValueError(f"p must exceed the latent dimension q={q}, got p={p}")


def simulate_ppca_pilot(
    n1: int, n2: int, p: int,
    model: AnalysisModel, prior: PriorSpec, rng: np.random.Generator,
) -> PilotMatrix:
    """Simulate pilot data from the PPCA model with parameters drawn from priors.

    Loadings rows ~ MVN_q(loadings_mean, loadings_cov), scores ~ MVN_q(0, I),
    noise variance ~ IG(ig_shape, ig_scale), then x_i ~ MVN_p(W u_i, sigma^2 I).
    """
    q = model.q
    _check_sizes(n1, n2, p, q)
    n = n1 + n2
    w_rng, u_rng, var_rng, eps_rng = rng.spawn(4)
    loadings = draw_gaussian_matrix(p, q, prior.mean_vector(q), prior.cov_matrix(q), w_rng)
    scores = u_rng.standard_normal((n, q))
    sigma2 = draw_inverse_gamma(prior.ig_shape, prior.ig_scale, var_rng)
    data = scores @ loadings.T + np.sqrt(sigma2) * eps_rng.standard_normal((n, p))
    return PilotMatrix(data=data, group=_group_labels(n1, n2), provenance="simulated")


def simulate_ppcca_pilot(
    n1: int, n2: int, p: int,
    model: AnalysisModel, prior: PriorSpec, rng: np.random.Generator,
) -> PilotMatrix:
    """Simulate pilot data from the PPCCA model: covariates shift the score means.

    The design matrix is an intercept column plus ``model.n_covariates``
    standard-Gaussian columns; coefficients are N(0, ppcca_coeff_sd^2) and the
    scores are u_i ~ MVN_q(B c_i, I).  With zero coefficients this reduces
    exactly to the PPCA simulator under a matched seed.
    """
    q = model.q
    c = model.n_covariates
    if c < 1:
        raise ValueError("ppcca simulation requires n_covariates >= 1")
    _check_sizes(n1, n2, p, q)
    n = n1 + n2
    w_rng, u_rng, var_rng, eps_rng, cov_rng, coef_rng = rng.spawn(6)
    loadings = draw_gaussian_matrix(p, q, prior.mean_vector(q), prior.cov_matrix(q), w_rng)
    covariates = cov_rng.standard_normal((n, c))
    design = np.hstack([np.ones((n, 1)), covariates])
    coeffs = prior.ppcca_coeff_sd * coef_rng.standard_normal((q, c + 1))
    scores = design @ coeffs.T + u_rng.standard_normal((n, q))
    sigma2 = draw_inverse_gamma(prior.ig_shape, prior.ig_scale, var_rng)
    data = scores @ loadings.T + np.sqrt(sigma2) * eps_rng.standard_normal((n, p))
    return PilotMatrix(
        data=data, group=_group_labels(n1, n2), covariates=covariates, provenance="simulated"
    )


def simulate_dppca_pilot(
    n1: int, n2: int, p: int,
    model: AnalysisModel, prior: PriorSpec, rng: np.random.Generator,
) -> PilotMatrix:
    """Simulate first-time-point pilot data from the DPPCA model.

    Identical to the PPCA simulator except the noise variance comes from the
    stationary stochastic-volatility law: sigma^2 = exp(h) with
    h ~ N(dppca_logvol_mean, dppca_logvol_sd^2).
    """
    q = model.q
    _check_sizes(n1, n2, p, q)
    n = n1 + n2
    w_rng, u_rng, var_rng, eps_rng = rng.spawn(4)
    loadings = draw_gaussian_matrix(p, q, prior.mean_vector(q), prior.cov_matrix(q), w_rng)
    scores = u_rng.standard_normal((n, q))
    logvol = prior.dppca_logvol_mean + prior.dppca_logvol_sd * var_rng.standard_normal()
    sigma2 = float(np.exp(logvol))
    data = scores @ loadings.T + np.sqrt(sigma2) * eps_rng.standard_normal((n, p))
    return PilotMatrix(data=data, group=_group_labels(n1, n2), provenance="simulated")


def simulate_from_fit(
    fit: FittedModel, n1: int, n2: int, rng: np.random.Generator
) -> PilotMatrix:
    """Simulate pilot data at fixed fitted parameter values (no prior draws).

    For a ppcca fit, covariate rows are resampled with replacement from the
    stored experimental covariates and the scores centre on B c_i.
    """
    if n1 < 2 or n2 < 2:
        raise ValueError(f"group sizes must be >= 2, got n1={n1}, n2={n2}")
    n = n1 + n2
    u_rng, eps_rng, boot_rng = rng.spawn(3)
    covariates = None
    if fit.coeffs is not None:
        if fit.covariates is None:
            raise ValueError("fitted model has coefficients but no stored covariates to resample")
        idx = boot_rng.integers(0, fit.covariates.shape[0], size=n)
        covariates = fit.covariates[idx]
        design = np.hstack([np.ones((n, 1)), covariates])
        score_means = design @ fit.coeffs.T
    else:
        score_means = np.zeros((n, fit.q))
    scores = score_means + u_rng.standard_normal((n, fit.q))
    data = fit.mean + scores @ fit.loadings.T
    data = data + np.sqrt(fit.noise_var) * eps_rng.standard_normal((n, fit.p))
    return PilotMatrix(
        data=data, group=_group_labels(n1, n2), covariates=covariates, provenance="simulated"
    )
