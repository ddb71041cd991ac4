"""Power-law fits ``value ~ c * q^slope`` by least squares in log-log space."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from conelab.exceptions import BadParamsError

DEFAULT_THRESHOLD = 0.15


def _log_xy(qs, values) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(qs, dtype=float).ravel()
    y = np.asarray(values, dtype=float).ravel()
    if x.shape != y.shape:
        raise BadParamsError(f"{x.size} q values but {y.size} measurements")
    if x.size < 2:
        raise BadParamsError("a slope needs at least two points")
    if np.any(x <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise BadParamsError("log-log fit needs positive finite data")
    return np.log(x), np.log(y)


def fit_slope(qs, values) -> float:
    """Least-squares exponent of ``values`` as a power of ``q``."""
    lx, ly = _log_xy(qs, values)
    lx = lx - lx.mean()
    return float(np.dot(lx, ly - ly.mean()) / np.dot(lx, lx))


def slope_verdict(slope: float, threshold: float = DEFAULT_THRESHOLD) -> str:
    if abs(slope) <= threshold:
        return "stable"
    return "growing" if slope > 0 else "decaying"


class PowerLawFit(RegressorMixin, BaseEstimator):
    """Fit ``y = exp(intercept_) * q ** slope_``.

    >>> fit = PowerLawFit().fit([[3], [5], [7]], [3 ** 0.5, 5 ** 0.5, 7 ** 0.5])
    >>> round(fit.slope_, 12)
    0.5
    """

    def __init__(self, threshold: float = DEFAULT_THRESHOLD):
        self.threshold = threshold

    def fit(self, X, y):
        lx, ly = _log_xy(X, y)
        self.slope_ = fit_slope(X, y)
        self.intercept_ = float(ly.mean() - self.slope_ * lx.mean())
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self)
        q = np.asarray(X, dtype=float).ravel()
        return np.exp(self.intercept_) * q**self.slope_

    @property
    def verdict_(self) -> str:
        check_is_fitted(self)
        return slope_verdict(self.slope_, self.threshold)
