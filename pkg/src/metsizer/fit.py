"""Maximum-likelihood fitting of the PPCA and PPCCA models to pilot data.

PPCA has a closed-form solution through the eigendecomposition of the sample
covariance; PPCCA is fitted by EM initialized from that solution with zero
covariate coefficients.
"""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np

from .errors import ModelDegenerateError
from .types import FittedModel, PilotMatrix

EIGENVALUE_FLOOR = 1e-12


def fit_ppca(data: PilotMatrix, q: int) -> FittedModel:
    """Closed-form ML fit of the PPCA model.

    The noise variance estimate is the mean of the p-q smallest eigenvalues of
    the sample covariance; the loadings are U_q (L_q - sigma^2 I)^(1/2) with the
    rotation fixed to the identity.  Raises ModelDegenerateError when the q-th
    eigenvalue does not exceed the noise estimate (the loading scale would be
    imaginary), which covers zero-covariance inputs.
    """
    x = data.data
    n, p = x.shape
    if n < 3:
        raise ValueError(f"need at least 3 samples to fit, got {n}")
    if q >= min(n - 1, p):
        raise ValueError(f"q must be < min(n-1, p) = {min(n - 1, p)}, got {q}")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = (centered.T @ centered) / n
    evals, evecs = np.linalg.eigh(cov)
    evals = np.maximum(evals, EIGENVALUE_FLOOR)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order]
    sigma2 = float(np.mean(evals[q:]))
    top = evals[:q]
    if top[-1] <= sigma2:
        raise ModelDegenerateError(
            f"eigenvalue {q} ({top[-1]:.3g}) does not exceed the noise estimate "
            f"({sigma2:.3g}); try a smaller latent dimension"
        )
    loadings = evecs[:, :q] * np.sqrt(top - sigma2)
    ll = _marginal_loglik(centered, loadings, sigma2, score_means=None)
    return FittedModel(
        kind="ppca", q=q, loadings=loadings, mean=mean, noise_var=sigma2,
        converged=True, n_iter=0, loglik=ll,
    )


def fit_ppcca(
    data: PilotMatrix, q: int, max_iter: int = 500, tol: float = 1e-7
) -> FittedModel:
    """EM fit of the PPCCA model (covariates shifting the latent-score means).

    Estimates {W, sigma^2, B} for scores u_i ~ N(B c_i, I) and
    x_i ~ N(W u_i + mu, sigma^2 I), starting from the closed-form PPCA solution
    with B = 0.  The log-likelihood is non-decreasing across iterations; if
    ``max_iter`` is reached before the relative change drops below ``tol`` the
    fit is returned with ``converged=False`` rather than raising.
    """
    if data.covariates is None:
        raise ValueError("ppcca fitting requires covariates on the pilot data")
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    x = data.data
    n, p = x.shape
    init = fit_ppca(data, q)
    mean = init.mean
    y = x - mean
    design = np.hstack([np.ones((n, 1)), data.covariates])
    c1 = design.shape[1]
    w = init.loadings
    sigma2 = init.noise_var
    coeffs = np.zeros((q, c1))

    gram_design = design.T @ design
    yy_total = float(np.sum(y * y))
    prev_ll = -np.inf
    ll = prev_ll
    ll_path = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        # E-step: posterior N(m_i, sigma^2 M^-1) with M = W'W + sigma^2 I
        m_mat = w.T @ w + sigma2 * np.eye(q)
        m_inv = np.linalg.inv(m_mat)
        post_cov = sigma2 * m_inv
        score_means = (y @ w + sigma2 * (design @ coeffs.T)) @ m_inv.T

        # M-step
        sum_uu = n * post_cov + score_means.T @ score_means
        coeffs = np.linalg.solve(gram_design, design.T @ score_means).T
        yw = y.T @ score_means
        w = np.linalg.solve(sum_uu, yw.T).T
        resid = yy_total - 2.0 * float(np.sum(yw * w)) + float(np.sum((w.T @ w) * sum_uu))
        sigma2 = max(resid / (n * p), EIGENVALUE_FLOOR)

        ll = _marginal_loglik(y, w, sigma2, score_means=design @ coeffs.T)
        ll_path.append(ll)
        if prev_ll > -np.inf and abs(ll - prev_ll) <= tol * max(1.0, abs(prev_ll)):
            converged = True
            break
        prev_ll = ll

    return FittedModel(
        kind="ppcca", q=q, loadings=w, mean=mean, noise_var=sigma2,
        coeffs=coeffs, covariates=np.array(data.covariates, copy=True),
        converged=converged, n_iter=it, loglik=ll, loglik_path=ll_path,
    )


def _marginal_loglik(
    y: np.ndarray, w: np.ndarray, sigma2: float, score_means: Optional[np.ndarray]
) -> float:
    """Marginal Gaussian log-likelihood of centered data under (W, sigma^2).

    Uses the low-rank identities: with M = W'W + sigma^2 I,
    log|WW' + sigma^2 I| = (p - q) log sigma^2 + log|M| and
    (WW' + sigma^2 I)^-1 = (I - W M^-1 W') / sigma^2.
    """
    n, p = y.shape
    q = w.shape[1]
    if score_means is not None:
        y = y - score_means @ w.T
    m_mat = w.T @ w + sigma2 * np.eye(q)
    sign, logdet_m = np.linalg.slogdet(m_mat)
    if sign <= 0:
        raise ModelDegenerateError("posterior precision lost positive-definiteness")
    logdet = (p - q) * math.log(sigma2) + logdet_m
    yw = y @ w
    quad = (float(np.sum(y * y)) - float(np.sum((yw @ np.linalg.inv(m_mat)) * yw))) / sigma2
    return -0.5 * (n * p * math.log(2.0 * math.pi) + n * logdet + quad)


def principal_angle_degrees(a: np.ndarray, b: np.ndarray) -> float:
    """Largest principal angle between the column spans of two matrices, in degrees."""
    qa, _ = np.linalg.qr(np.asarray(a, dtype=float))
    qb, _ = np.linalg.qr(np.asarray(b, dtype=float))
    sv = np.linalg.svd(qa.T @ qb, compute_uv=False)
    sv = np.clip(sv, -1.0, 1.0)
    return float(np.degrees(np.arccos(sv.min())))
