"""Low-level random draws used by the pilot-data simulators.

All samplers take an explicit ``numpy.random.Generator`` so every caller is a
pure function of (arguments, stream state) and parallel use stays reproducible.
"""

from __future__ import annotations

from typing import Union

import numpy as np

from .errors import DecompositionError


def draw_inverse_gamma(shape: float, scale: float, rng: np.random.Generator) -> float:
    """One draw from InverseGamma(shape, scale), density ~ x^(-shape-1) exp(-scale/x).

    Uses the reciprocal of a Gamma(shape, rate=scale) draw.  Mean is
    scale/(shape-1) for shape > 1, variance scale^2/((shape-1)^2 (shape-2))
    for shape > 2.
    """
    if shape <= 0 or scale <= 0:
        raise ValueError(f"shape and scale must be > 0, got shape={shape}, scale={scale}")
    g = rng.gamma(shape, 1.0 / scale)
    # A zero gamma draw has probability zero but would divide by zero.
    while g == 0.0:
        g = rng.gamma(shape, 1.0 / scale)
    return float(1.0 / g)


def draw_gaussian_matrix(
    rows: int,
    cols: int,
    mean: Union[float, np.ndarray],
    row_cov: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Matrix whose rows are iid MVN(mean, row_cov) draws.

    ``mean`` may be a scalar, a length-``cols`` vector shared by every row, or
    a full rows x cols matrix of per-row means.  ``row_cov`` must be symmetric
    positive-definite; it is factorized once by Cholesky decomposition.
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"rows and cols must be >= 1, got {rows}x{cols}")
    cov = np.asarray(row_cov, dtype=float)
    if cov.shape != (cols, cols):
        raise ValueError(f"row_cov must be {cols}x{cols}, got {cov.shape}")
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(
            f"row_cov is not symmetric positive-definite (Cholesky failed): {cov!r}"
        ) from exc
    z = rng.standard_normal((rows, cols))
    out = z @ chol.T
    out += np.broadcast_to(np.asarray(mean, dtype=float), out.shape)
    return out
