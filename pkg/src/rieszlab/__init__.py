"""Numerical laboratory for Riesz projection norms on weighted Hardy spaces,
analytic certificates, and power bounds of fast monotone multipliers."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError,
    NotEquivalent,
    NotPositiveDefinite,
    NumericalError,
    RieszLabError,
    VerificationFailed,
)
from .weights import FourierTable, WeightSpec, fourier_coeffs  # noqa: F401
