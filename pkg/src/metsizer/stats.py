"""Moderated two-sample statistics, permutation nulls and FDR estimation.

The FDR for one dataset is estimated by permuting group labels, planting a
known set of truly-significant features via an effect-size shift, declaring
everything at or beyond the resulting cutoff, and counting the unplanted
fraction among the declared.
"""

from __future__ import annotations

import math
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateStatisticError
from .types import EstimationConfig, FdrEstimate, PermutationNull, PilotMatrix, StatVector

# The single percentile convention used everywhere in the pipeline: linear
# interpolation between closest order statistics ("type 7").
def percentile(values: Sequence[float], q: Union[float, Sequence[float]]):
    return np.percentile(np.asarray(values, dtype=float), q, method="linear")


def _as_matrix(data: Union[PilotMatrix, np.ndarray]) -> np.ndarray:
    if isinstance(data, PilotMatrix):
        return data.data
    return np.asarray(data, dtype=float)


def pooled_se(data: Union[PilotMatrix, np.ndarray], labels: np.ndarray) -> np.ndarray:
    """Per-feature pooled standard error of the two-group mean difference.

    S_j = sqrt((1/n1 + 1/n2) * ((n1-1) s1_j^2 + (n2-1) s2_j^2) / (n1 + n2 - 2))
    with s_gj^2 the unbiased within-group variances.
    """
    x = _as_matrix(data)
    labels = np.asarray(labels)
    g1 = x[labels == 1]
    g2 = x[labels == 2]
    n1, n2 = g1.shape[0], g2.shape[0]
    if n1 < 2 or n2 < 2:
        raise ValueError(f"both groups need >= 2 members, got n1={n1}, n2={n2}")
    v1 = g1.var(axis=0, ddof=1)
    v2 = g2.var(axis=0, ddof=1)
    pooled_var = ((n1 - 1) * v1 + (n2 - 1) * v2) / (n1 + n2 - 2)
    return np.sqrt((1.0 / n1 + 1.0 / n2) * pooled_var)


def correction_factor(pooled_se_values: np.ndarray) -> float:
    """The 5th percentile of the pooled SEs; added to every denominator so
    near-zero-variance features cannot produce huge statistics."""
    values = np.asarray(pooled_se_values, dtype=float)
    if values.size < 1:
        raise ValueError("need at least one pooled SE")
    return float(percentile(values, 5))


def t_statistics(
    data: Union[PilotMatrix, np.ndarray], labels: np.ndarray, cf: float
) -> StatVector:
    """Moderated two-sample statistics TS_j = (mean1_j - mean2_j) / (S_j + cf)."""
    x = _as_matrix(data)
    labels = np.asarray(labels)
    se = pooled_se(x, labels)
    denom = se + cf
    if np.any(denom == 0.0):
        raise DegenerateStatisticError(np.flatnonzero(denom == 0.0))
    mean1 = x[labels == 1].mean(axis=0)
    mean2 = x[labels == 2].mean(axis=0)
    return StatVector(ts=(mean1 - mean2) / denom, pooled_se=se, cf=float(cf))


def permutation_null(
    data: Union[PilotMatrix, np.ndarray],
    labels: np.ndarray,
    T: int,
    cf: float,
    rng: np.random.Generator,
) -> PermutationNull:
    """Statistics under T uniformly random group-preserving label permutations.

    Each row t is the moderated statistic vector (and its pooled SEs) under one
    permutation of the label vector; the correction factor is held fixed.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    x = _as_matrix(data)
    labels = np.asarray(labels)
    n = labels.shape[0]
    ts = np.empty((T, x.shape[1]))
    se = np.empty((T, x.shape[1]))
    for t in range(T):
        permuted = labels[rng.permutation(n)]
        stat = t_statistics(x, permuted, cf)
        ts[t] = stat.ts
        se[t] = stat.pooled_se
    return PermutationNull(ts=ts, pooled_se=se)


def fdr_single_permutation(
    ts_row: np.ndarray,
    se_row: np.ndarray,
    n1: int,
    n2: int,
    m: float,
    delta: float,
    rng: np.random.Generator,
) -> float:
    """Estimated FDR for one permutation's statistic vector.

    Plants round(m*p) features by adding delta / (rho_j * sqrt(1/n1 + 1/n2)) to
    their statistics, where rho_j is the within-group SD estimated as
    se_row_j / sqrt(1/n1 + 1/n2) - algebraically a shift of delta / se_row_j.
    ``se_row`` must be strictly positive; callers substitute the correction
    factor for any exactly-zero pooled SE.  The cutoff is the p_o-th largest
    absolute statistic; everything at or beyond it is declared and the
    unplanted fraction is returned.
    """
    ts_row = np.asarray(ts_row, dtype=float)
    se_row = np.asarray(se_row, dtype=float)
    p = ts_row.shape[0]
    if not (0.0 < m < 1.0):
        raise ValueError(f"m must be in (0, 1), got {m}")
    if np.any(se_row <= 0.0):
        raise ValueError("se_row entries must be > 0 (correction factor included)")
    p_o = int(math.floor(m * p + 0.5))
    if p_o < 1:
        raise ValueError(f"round(m*p) = {p_o} must be >= 1 (m={m}, p={p})")
    planted = rng.choice(p, size=p_o, replace=False)
    shifted = ts_row.copy()
    shifted[planted] += delta / se_row[planted]
    abs_stat = np.abs(shifted)
    crit = np.partition(abs_stat, p - p_o)[p - p_o]
    declared = abs_stat >= crit
    n_declared = int(np.count_nonzero(declared))
    planted_mask = np.zeros(p, dtype=bool)
    planted_mask[planted] = True
    false_count = int(np.count_nonzero(declared & ~planted_mask))
    return false_count / max(n_declared, 1)


def dataset_fdr(
    data: PilotMatrix, config: EstimationConfig, rng: np.random.Generator
) -> FdrEstimate:
    """FDR estimate for one pilot dataset: median over per-permutation values.

    The correction factor is computed once from the unpermuted labelling and
    reused across all permutations; planted features are resampled
    independently for each permutation.
    """
    labels = data.group
    n1, n2 = data.n1, data.n2
    cf = correction_factor(pooled_se(data, labels))
    null = permutation_null(data, labels, config.permutations, cf, rng)
    values = np.empty(config.permutations)
    for t in range(config.permutations):
        # The shift denominator is the raw pooled SE; cf substitutes only where
        # an SE is exactly zero, so the vector stays strictly positive.
        se_row = np.where(null.pooled_se[t] > 0.0, null.pooled_se[t], cf)
        values[t] = fdr_single_permutation(
            null.ts[t], se_row, n1, n2, config.m, config.delta, rng
        )
    p_o = int(math.floor(config.m * data.p + 0.5))
    return FdrEstimate(
        per_permutation=values,
        dataset_fdr=float(percentile(values, 50)),
        n1=n1, n2=n2, p_o=p_o,
    )
