"""The outer sample-size search.

For each candidate size the engine simulates ``simulations`` pilot datasets,
estimates each dataset's FDR from its permutation null, and records the
10th/50th/90th percentiles.  The estimate n-hat is read off the median curve
by ordinary least squares through the points bracketing the target FDR.

Reproducibility: one child stream per grid point is derived up front from the
config seed, and one grand-child stream per simulation inside a point, so
results are identical no matter how the work is scheduled.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .simulate import (
    simulate_dppca_pilot,
    simulate_from_fit,
    simulate_ppca_pilot,
    simulate_ppcca_pilot,
)
from .stats import dataset_fdr, percentile
from .types import (
    EstimationConfig,
    FdrCurvePoint,
    FittedPilot,
    PilotMatrix,
    PriorDraws,
    SampleSizeResult,
)

_SIMULATORS = {
    "ppca": simulate_ppca_pilot,
    "ppcca": simulate_ppcca_pilot,
    "dppca": simulate_dppca_pilot,
}


def candidate_grid(config: EstimationConfig) -> List[Tuple[int, int]]:
    """Ordered (n1, n2) candidates: totals from n_min to n_max in grid_step
    increments, each split by the (reduced) group ratio."""
    r1, r2 = config.reduced_ratio()
    d = r1 + r2
    if config.n_min % d != 0:
        raise ValueError(f"n_min={config.n_min} does not split by ratio {r1}:{r2}")
    if config.grid_step % d != 0:
        raise ValueError(f"grid_step={config.grid_step} does not preserve ratio {r1}:{r2}")
    grid = []
    for n in range(config.n_min, config.n_max + 1, config.grid_step):
        grid.append((n // d * r1, n // d * r2))
    if not grid:
        raise ValueError(f"empty grid: n_min={config.n_min} exceeds n_max={config.n_max}")
    if min(grid[0]) < 2:
        raise ValueError(f"first grid point {grid[0]} leaves a group below 2 samples")
    return grid


def _simulate_dataset(
    n1: int, n2: int, config: EstimationConfig, rng: np.random.Generator
) -> PilotMatrix:
    if isinstance(config.source, FittedPilot):
        return simulate_from_fit(config.source.fit, n1, n2, rng)
    prior = config.source.prior
    simulator = _SIMULATORS[config.model.kind]
    return simulator(n1, n2, config.p, config.model, prior, rng)


def fdr_percentiles_at(
    n1: int,
    n2: int,
    config: EstimationConfig,
    rng: np.random.Generator,
    threads: int = 1,
) -> FdrCurvePoint:
    """10th/50th/90th FDR percentiles over ``config.simulations`` pilot datasets."""
    if n1 < 2 or n2 < 2:
        raise ValueError(f"group sizes must be >= 2, got n1={n1}, n2={n2}")
    streams = rng.spawn(config.simulations)

    def one(s: int) -> float:
        data_rng, fdr_rng = streams[s].spawn(2)
        try:
            data = _simulate_dataset(n1, n2, config, data_rng)
            return dataset_fdr(data, config, fdr_rng).dataset_fdr
        except Exception as exc:
            raise RuntimeError(
                f"simulation failed at n1={n1}, n2={n2}, s={s}: {exc}"
            ) from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(one, range(config.simulations)))
    else:
        values = [one(s) for s in range(config.simulations)]
    q10, q50, q90 = (float(v) for v in percentile(values, [10, 50, 90]))
    return FdrCurvePoint(n=n1 + n2, n1=n1, n2=n2, fdr10=q10, fdr50=q50, fdr90=q90)


class Interpolation(NamedTuple):
    n_hat: Optional[int]
    reason: Optional[str]


def interpolate_sample_size(
    curve: Sequence[FdrCurvePoint],
    target: float,
    group_ratio: Tuple[int, int] = (1, 1),
) -> Interpolation:
    """Read the sample size at the target FDR off the median curve.

    Regresses fdr50 on n over the points bracketing the target (from the point
    just before the first at-or-below-target point through the last
    above-target point, so non-monotone wiggles widen the bracket) and rounds
    the solution up to the next total compatible with the group ratio.
    Returns no estimate with reason "grid-exhausted" when the whole curve sits
    above the target, and the smallest grid size when it never rises above.
    """
    if len(curve) == 0:
        raise ValueError("curve must be nonempty")
    totals = [pt.n for pt in curve]
    if any(b <= a for a, b in zip(totals, totals[1:])):
        raise ValueError("curve must be sorted by strictly increasing n")
    med = [pt.fdr50 for pt in curve]
    below = [i for i, v in enumerate(med) if v <= target]
    above = [i for i, v in enumerate(med) if v > target]
    if not below:
        return Interpolation(None, "grid-exhausted")
    if not above:
        return Interpolation(totals[0], None)

    first_below = below[0]
    last_above = above[-1]
    lo = max(first_below - 1, 0)
    hi = max(last_above, first_below)
    xs = np.array(totals[lo : hi + 1], dtype=float)
    ys = np.array(med[lo : hi + 1], dtype=float)
    slope, intercept = np.polyfit(xs, ys, 1)
    if slope == 0.0 or not np.isfinite(slope):
        solution = float(totals[first_below])
    else:
        solution = (target - intercept) / slope
        if not np.isfinite(solution):
            solution = float(totals[first_below])
    r1, r2 = (int(v) for v in group_ratio)
    g = int(np.gcd(r1, r2))
    d = (r1 + r2) // g
    n_hat = int(np.ceil(solution / d)) * d
    n_hat = max(n_hat, 2 * d)
    return Interpolation(n_hat, None)


def estimate_sample_size(
    config: EstimationConfig,
    threads: int = 1,
    on_point: Optional[Callable[[FdrCurvePoint, int, int], None]] = None,
    cancel: Optional[Callable[[], bool]] = None,
) -> SampleSizeResult:
    """Run the full search over the candidate grid.

    Unless ``config.full_grid`` is set, evaluation stops once the median has
    crossed the target and two consecutive points sit strictly below it (the
    bracketing points needed for interpolation are never pruned).
    ``on_point`` receives (point, points_done, grid_size) as the curve grows;
    ``cancel`` is polled between grid points.
    """
    config.validate()
    started = time.perf_counter()
    grid = candidate_grid(config)
    root = np.random.default_rng(config.seed)
    streams = root.spawn(len(grid))

    curve: List[FdrCurvePoint] = []
    crossed = False
    run_below = 0
    for k, (n1, n2) in enumerate(grid):
        if cancel is not None and cancel():
            raise InterruptedError("sample-size search cancelled")
        point = fdr_percentiles_at(n1, n2, config, streams[k], threads=threads)
        curve.append(point)
        if on_point is not None:
            on_point(point, k + 1, len(grid))
        if point.fdr50 <= config.target_fdr:
            crossed = True
        run_below = run_below + 1 if point.fdr50 < config.target_fdr else 0
        if not config.full_grid and crossed and run_below >= 2:
            break

    interp = interpolate_sample_size(curve, config.target_fdr, config.reduced_ratio())
    if interp.n_hat is None:
        n1_hat = n2_hat = None
    else:
        r1, r2 = config.reduced_ratio()
        n1_hat = interp.n_hat // (r1 + r2) * r1
        n2_hat = interp.n_hat // (r1 + r2) * r2
    return SampleSizeResult(
        config=config,
        curve=curve,
        n_hat=interp.n_hat,
        n1_hat=n1_hat,
        n2_hat=n2_hat,
        converged=interp.n_hat is not None,
        no_estimate_reason=interp.reason,
        points_evaluated=len(curve),
        grid_exhausted=interp.reason == "grid-exhausted",
        wall_time_s=time.perf_counter() - started,
    )


def sweep_proportion(
    config: EstimationConfig,
    n_totals: Sequence[int],
    proportions: Sequence[float],
    threads: int = 1,
) -> List[dict]:
    """FDR percentiles over a (total n) x (significant proportion) grid.

    Used to show how the expected proportion of significant features moves the
    FDR at fixed sample sizes.  Streams are derived per cell in row-major
    order, so the sweep is reproducible and cells are independent.
    """
    config.validate()
    records = []
    root = np.random.default_rng(config.seed)
    streams = root.spawn(len(n_totals) * len(proportions))
    k = 0
    for n in n_totals:
        n1, n2 = config.split_total(int(n))
        for m in proportions:
            cell_cfg = replace(config, m=float(m))
            cell_cfg.validate()
            point = fdr_percentiles_at(n1, n2, cell_cfg, streams[k], threads=threads)
            records.append(
                {
                    "n": int(n), "m": float(m),
                    "fdr10": point.fdr10, "fdr50": point.fdr50, "fdr90": point.fdr90,
                }
            )
            k += 1
    return records
