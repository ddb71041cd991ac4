"""Input validation helpers in the spirit of ``sklearn.utils.validation``.

``sklearn.utils.check_array`` rejects complex input, so functions on F_q^d
are validated here instead.
"""

from __future__ import annotations

import numpy as np

from conelab.exceptions import SideMismatchError, SupportViolationError
from conelab.harmonic import FunctionOnSpace, Side


def check_function_array(X, n_features: int, name: str = "X") -> np.ndarray:
    """Return ``X`` as a 2-D complex array with ``n_features`` columns."""
    arr = np.asarray(X)
    if arr.dtype == object:
        raise TypeError(f"{name} must be numeric")
    arr = np.array(arr, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got {arr.ndim}-D")
    if arr.shape[1] != n_features:
        raise ValueError(f"{name} has {arr.shape[1]} features, expected {n_features}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinity")
    return arr


def as_function(x, field, d, side: Side = Side.SpaceDX) -> FunctionOnSpace:
    if isinstance(x, FunctionOnSpace):
        if x.side is not side:
            raise SideMismatchError(f"expected a function on {side.name}")
        return x
    return FunctionOnSpace(np.asarray(x), side, field, d)


def values_on_variety(h, variety, tol: float = 0.0) -> np.ndarray:
    """Restrict ``h`` to ``variety``.

    ``h`` is either an array of ``|V|`` values in the variety's point order or
    a full-length function that must vanish off the variety.
    """
    if isinstance(h, FunctionOnSpace):
        vals = h.values
    else:
        vals = np.asarray(h, dtype=np.complex128)
        if vals.shape == (variety.cardinality,):
            return vals
    n = variety.q**variety.d
    if vals.shape != (n,):
        raise ValueError(f"expected {variety.cardinality} or {n} values, got {vals.shape}")
    off = np.ones(n, dtype=bool)
    off[variety.points] = False
    if np.any(np.abs(vals[off]) > tol):
        raise SupportViolationError("function is nonzero off the variety")
    return vals[variety.points]
