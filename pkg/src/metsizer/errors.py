"""Exception types raised by the estimation pipeline.

Plain ``ValueError`` is used for ordinary invalid arguments; the classes here
mark failure modes callers may want to catch individually.
"""

from __future__ import annotations

from typing import Sequence


class MetsizerError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(MetsizerError):
    """A configuration field failed validation.

    Carries the offending field name so front ends (CLI, HTTP API, forms)
    can point at the exact input.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class DecompositionError(MetsizerError):
    """A matrix factorization failed (e.g. Cholesky of a non-SPD covariance)."""


class ModelDegenerateError(MetsizerError):
    """A fitted latent-variable model is degenerate for the requested rank."""


class DegenerateStatisticError(MetsizerError):
    """Some test statistics have a zero denominator; lists the offending indices."""

    def __init__(self, indices: Sequence[int]):
        self.indices = list(int(i) for i in indices)
        super().__init__(
            f"zero denominator (pooled SE + correction factor) at indices {self.indices}"
        )


class PilotDataError(MetsizerError):
    """A pilot data file failed to parse or validate; message carries coordinates."""
