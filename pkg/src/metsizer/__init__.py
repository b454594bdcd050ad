"""Sample-size estimation for two-group high-dimensional studies.

Simulates pseudo-pilot data from the analysis model the study will use (or
from parameters fitted to real pilot data), estimates each dataset's FDR by a
permutation scheme with planted effects, and searches a sample-size grid for
the point where the median FDR meets the user's target.
"""

from .errors import (
    ConfigError,
    DecompositionError,
    DegenerateStatisticError,
    MetsizerError,
    ModelDegenerateError,
    PilotDataError,
)
from .fit import fit_ppca, fit_ppcca
from .sampling import draw_gaussian_matrix, draw_inverse_gamma
from .search import (
    candidate_grid,
    estimate_sample_size,
    fdr_percentiles_at,
    interpolate_sample_size,
    sweep_proportion,
)
from .simulate import (
    simulate_dppca_pilot,
    simulate_from_fit,
    simulate_ppca_pilot,
    simulate_ppcca_pilot,
)
from .stats import (
    correction_factor,
    dataset_fdr,
    fdr_single_permutation,
    percentile,
    permutation_null,
    pooled_se,
    t_statistics,
)
from .types import (
    AnalysisModel,
    EstimationConfig,
    FdrCurvePoint,
    FdrEstimate,
    FittedModel,
    FittedPilot,
    PilotMatrix,
    PriorDraws,
    PriorSpec,
    SampleSizeResult,
    StatVector,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisModel",
    "ConfigError",
    "DecompositionError",
    "DegenerateStatisticError",
    "EstimationConfig",
    "FdrCurvePoint",
    "FdrEstimate",
    "FittedModel",
    "FittedPilot",
    "MetsizerError",
    "ModelDegenerateError",
    "PilotDataError",
    "PilotMatrix",
    "PriorDraws",
    "PriorSpec",
    "SampleSizeResult",
    "StatVector",
    "candidate_grid",
    "correction_factor",
    "dataset_fdr",
    "draw_gaussian_matrix",
    "draw_inverse_gamma",
    "estimate_sample_size",
    "fdr_percentiles_at",
    "fdr_single_permutation",
    "fit_ppca",
    "fit_ppcca",
    "interpolate_sample_size",
    "percentile",
    "permutation_null",
    "pooled_se",
    "simulate_dppca_pilot",
    "simulate_from_fit",
    "simulate_ppca_pilot",
    "simulate_ppcca_pilot",
    "sweep_proportion",
    "t_statistics",
]
