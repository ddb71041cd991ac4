"""Finite-field cone averaging operators and their restricted L^p -> L^r behavior."""

__version__ = "0.1.0"

from conelab.field import GF, field_from_q, field_make  # noqa: E402
from conelab.harmonic import FunctionOnSpace, Side, fourier_hat, inverse_fourier  # noqa: E402
from conelab.varieties import cone, max_subspace_in_cone  # noqa: E402
from conelab.operators import ExponentPair, RestrictedAveraging, l2_opnorm  # noqa: E402

__all__ = [
    "GF",
    "field_from_q",
    "field_make",
    "FunctionOnSpace",
    "Side",
    "fourier_hat",
    "inverse_fourier",
    "cone",
    "max_subspace_in_cone",
    "ExponentPair",
    "RestrictedAveraging",
    "l2_opnorm",
]
