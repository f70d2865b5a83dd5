"""Numerical laboratory for boundary response maps of Schrodinger operators
on the unit ball, with certified special-function envelopes, decay sweeps,
structured counterexample families, and covering-number estimates."""

__version__ = "0.1.0"

from .errors import (
    CapabilityError,
    ConditioningError,
    ConvergenceError,
    DtnLabError,
    ParameterError,
    PoleError,
    RegularityError,
    ScaleOverflowError,
)
from .special_functions import (
    EnvelopeReport,
    LogScaledEval,
    Order,
    SeriesEval,
    bessel_deriv,
    bessel_deriv_log,
    bessel_j,
    bessel_j_log,
    bessel_j_zeros,
    bessel_y,
    bessel_y_log,
    envelope_order_threshold,
    leading_term_deviation_bound,
    verify_envelope_bounds,
)
