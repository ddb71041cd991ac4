"""The restricted averaging operator ``A_C f = (f * sigma)|_C``, its adjoint,
their kernel decompositions, and operator ratios over test families.

The functional API works on :class:`~conelab.harmonic.FunctionOnSpace`
values.  :class:`RestrictedAveraging` wraps it as a scikit-learn transformer
whose rows are functions on F_q^d.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from conelab.exceptions import BadParamsError, TooLargeError, ZeroFunctionError
from conelab.field import GF, check_points, field_make, point_coords
from conelab.harmonic import (
    FunctionOnSpace,
    Side,
    constant,
    delta,
    fourier_hat,
    indicator,
    inverse_fourier,
    lp_norm,
    weighted_norm,
)
from conelab.validation import as_function, check_function_array, values_on_variety
from conelab.varieties import Variety, cone as build_cone, max_subspace_in_cone


@dataclass(frozen=True, order=True)
class ExponentPair:
    """A point ``(1/p, 1/r)`` of the unit square, stored exactly."""

    inv_p: Fraction
    inv_r: Fraction

    def __post_init__(self):
        a, b = Fraction(self.inv_p), Fraction(self.inv_r)
        if not (0 <= a <= 1 and 0 <= b <= 1):
            raise BadParamsError(f"exponent pair ({a}, {b}) outside [0,1]^2")
        object.__setattr__(self, "inv_p", a)
        object.__setattr__(self, "inv_r", b)

    @classmethod
    def parse(cls, text: str) -> "ExponentPair":
        """Parse ``"5/6:1/4"`` (or ``"5/6,1/4"``)."""
        sep = ":" if ":" in text else ","
        a, b = text.split(sep)
        return cls(Fraction(a.strip()), Fraction(b.strip()))

    @property
    def p(self) -> float:
        return math.inf if self.inv_p == 0 else float(1 / self.inv_p)

    @property
    def r(self) -> float:
        return math.inf if self.inv_r == 0 else float(1 / self.inv_r)

    def dual(self) -> "ExponentPair":
        """The pair ``(1/p', 1/r')`` of conjugate exponents."""
        return ExponentPair(1 - self.inv_p, 1 - self.inv_r)

    def __str__(self):
        return f"{self.inv_p}:{self.inv_r}"


def _exponent(inv: Fraction) -> float:
    return math.inf if inv == 0 else float(1 / Fraction(inv))


class Direction(str, enum.Enum):
    FORWARD = "forward"
    ADJOINT = "adjoint"


@dataclass(frozen=True)
class RatioResult:
    q: int
    d: int
    family_id: str
    pair: ExponentPair
    ratio: float
    direction: Direction


def _dx_function(f, cone: Variety | None) -> tuple[FunctionOnSpace, Variety]:
    if isinstance(f, FunctionOnSpace):
        f = as_function(f, f.field, f.d, Side.SpaceDX)
        return f, (build_cone(f.field, f.d) if cone is None else cone)
    if cone is None:
        raise BadParamsError("plain arrays need an explicit cone")
    return as_function(f, cone.field, cone.d, Side.SpaceDX), cone


def _spectral_multiply(f: FunctionOnSpace, multiplier: FunctionOnSpace) -> FunctionOnSpace:
    return fourier_hat(inverse_fourier(f) * multiplier)


def apply_restricted(f: FunctionOnSpace, cone: Variety | None = None) -> np.ndarray:
    """``(f * sigma)(y) = |C|^-1 sum_{x in C} f(y - x)`` for ``y`` in ``C``.

    Returns the values in the order of ``cone.points``.
    """
    f, cone = _dx_function(f, cone)
    return _spectral_multiply(f, cone.measure_transform).values[cone.points]


def apply_adjoint(h, cone: Variety) -> FunctionOnSpace:
    """``A_C^* h = (q^{2d} / |C|^2) (h * C)`` for ``h`` supported on ``C``.

    ``h`` is either ``|C|`` values in cone order or a full function on dx
    that vanishes off the cone.
    """
    hc = values_on_variety(h, cone)
    full = np.zeros(cone.q**cone.d, dtype=np.complex128)
    full[cone.points] = hc
    hf = FunctionOnSpace(full, Side.SpaceDX, cone.field, cone.d)
    scale = cone.q ** (2 * cone.d) / cone.cardinality**2
    return _spectral_multiply(hf, cone.indicator_transform) * scale


def cone_kernel(cone: Variety, which: str) -> FunctionOnSpace:
    """``K = sigma^v - delta_0`` or ``M = C^v - (|C|/q^d) delta_0`` for ``cone``."""
    src = cone.measure_transform if which == "K" else cone.indicator_transform
    vals = src.values.copy()
    vals[0] = 0.0
    return FunctionOnSpace(vals, Side.DualDM, cone.field, cone.d)


def convolve_kernel_hat(f: FunctionOnSpace, kernel: FunctionOnSpace) -> FunctionOnSpace:
    """``f * kernel^`` computed as ``(f^v kernel)^``."""
    return _spectral_multiply(f, kernel)


class ForwardPieces(NamedTuple):
    mean_part: np.ndarray
    oscillatory_part: np.ndarray
    residual: float


class AdjointPieces(NamedTuple):
    oscillatory_part: FunctionOnSpace
    mean_part: FunctionOnSpace
    residual: float


def decompose_forward(f: FunctionOnSpace, cone: Variety | None = None) -> ForwardPieces:
    """Split ``A_C f`` into ``f * 1`` and ``f * K^`` on the cone."""
    f, cone = _dx_function(f, cone)
    mean = np.full(cone.cardinality, np.mean(f.values), dtype=np.complex128)
    osc = convolve_kernel_hat(f, cone_kernel(cone, "K")).values[cone.points]
    resid = float(np.max(np.abs(apply_restricted(f, cone) - mean - osc)))
    return ForwardPieces(mean, osc, resid)


def decompose_adjoint(h, cone: Variety) -> AdjointPieces:
    """Split ``A_C^* h`` into ``(q^{2d}/|C|^2) h * M^`` and ``(q^d/|C|) h * 1``."""
    hc = values_on_variety(h, cone)
    full = np.zeros(cone.q**cone.d, dtype=np.complex128)
    full[cone.points] = hc
    hf = FunctionOnSpace(full, Side.SpaceDX, cone.field, cone.d)
    qd, nc = cone.q**cone.d, cone.cardinality
    osc = convolve_kernel_hat(hf, cone_kernel(cone, "M")) * (qd**2 / nc**2)
    mean = constant(cone.field, cone.d, np.mean(full) * qd / nc)
    resid = float(np.max(np.abs(apply_adjoint(hc, cone).values - osc.values - mean.values)))
    return AdjointPieces(osc, mean, resid)


def ratio(f, pair: ExponentPair, direction=Direction.FORWARD, cone: Variety | None = None,
          family_id: str = "") -> RatioResult:
    """Operator ratio for one test function.

    Forward: ``||A_C f||_{L^r(C, sigma)} / ||f||_{L^p(dx)}``.
    Adjoint: ``||A_C^* h||_{L^p'(dx)} / ||h||_{L^r'(C, sigma)}``.
    """
    direction = Direction(direction)
    if direction is Direction.FORWARD:
        f, cone = _dx_function(f, cone)
        den = lp_norm(f, _exponent(pair.inv_p))
        if den == 0:
            raise ZeroFunctionError("test function is zero")
        num = weighted_norm(apply_restricted(f, cone), 1.0 / cone.cardinality, _exponent(pair.inv_r))
    else:
        if cone is None:
            if not isinstance(f, FunctionOnSpace):
                raise BadParamsError("plain arrays need an explicit cone")
            cone = build_cone(f.field, f.d)
        hc = values_on_variety(f, cone)
        dual = pair.dual()
        den = weighted_norm(hc, 1.0 / cone.cardinality, _exponent(dual.inv_r))
        if den == 0:
            raise ZeroFunctionError("test function is zero")
        num = lp_norm(apply_adjoint(hc, cone), _exponent(dual.inv_p))
    return RatioResult(cone.q, cone.d, family_id, pair, num / den, direction)


def _dense_matrix(field: GF, d: int, cone: Variety) -> np.ndarray:
    coords = point_coords(field, d)
    ys = coords[cone.points]
    diff = field.sub(ys[:, None, :], coords[None, :, :])
    diff_idx = diff @ (field.q ** np.arange(d, dtype=np.int64))
    return cone.mask()[diff_idx] / cone.cardinality


def l2_opnorm(field: GF, d: int, method: str = "svd", limit: int = 4096, seed: int = 0,
              tol: float = 1e-13, max_iter: int = 20_000) -> float:
    """Norm of ``A_C`` from ``L^2(dx)`` to ``L^2(C, sigma)``.

    ``svd`` takes the top singular value of the dense ``|C| x q^d`` matrix;
    ``power`` iterates ``A_C^* A_C`` through the transform path.
    """
    n = check_points(field, d)
    if n > limit:
        raise TooLargeError(f"q^d = {n} exceeds dense limit {limit}")
    cone = build_cone(field, d)
    if method == "svd":
        mat = _dense_matrix(field, d, cone)
        smax = float(np.linalg.norm(mat, 2))
        return smax * math.sqrt(n / cone.cardinality)
    if method != "power":
        raise BadParamsError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    f = FunctionOnSpace(rng.standard_normal(n), Side.SpaceDX, field, d)
    lam = 0.0
    for _ in range(max_iter):
        g = apply_adjoint(apply_restricted(f, cone), cone)
        new = float(np.real(np.vdot(f.values, g.values))) / float(np.vdot(f.values, f.values).real)
        f = g * (1.0 / np.linalg.norm(g.values))
        if abs(new - lam) <= tol * max(new, 1.0):
            lam = new
            break
        lam = new
    return math.sqrt(lam)


# --- test families ---

FAMILY_NAMES = ("constant", "delta", "cone", "subspace", "random", "dyadic", "custom")


@dataclass(frozen=True)
class TestFamily:
    """Recipe for a deterministic list of test functions.

    ``params`` by family:

    * ``random``: ``size``, ``count`` (default 4)
    * ``dyadic``: ``levels``, ``exponent`` (default 2), ``scale`` (default 1),
      ``count`` (default 1)
    * ``custom``: ``functions``, a list of value arrays
    * every family: ``support`` in ``{"space", "cone"}``; adjoint-direction
      families must live on the cone
    """

    __test__ = False

    name: str
    params: dict = dc_field(default_factory=dict)
    seed: int = 0

    @property
    def label(self) -> str:
        keys = [f"{k}={v}" for k, v in sorted(self.params.items())
                if k not in ("functions", "support")]
        return self.name + (f"({','.join(keys)})" if keys else "")


def _support_points(field, d, support):
    n = field.q**d
    if support == "space":
        return np.arange(n, dtype=np.int64)
    if support == "cone":
        return build_cone(field, d).points
    raise BadParamsError(f"unknown support {support!r}")


def dyadic_sizes(levels: int, exponent: float, scale: float, available: int) -> list[int]:
    """Set sizes ``floor(scale 2^{exponent i} / levels)`` (at least 1), clipped
    so the sets fit disjointly in ``available`` points.

    With these sizes ``sum_i 2^{-exponent i} |E_i|`` is about ``scale``.
    """
    sizes, left = [], available
    for i in range(levels):
        s = max(1, int(scale * 2.0 ** (exponent * i) / levels))
        s = min(s, left)
        if s <= 0:
            break
        sizes.append(s)
        left -= s
    return sizes


def generate_family(family: TestFamily, field: GF, d: int) -> list[tuple[str, FunctionOnSpace]]:
    """Deterministic ``(member_id, function)`` list for ``family``."""
    name, prm = family.name, family.params
    if name not in FAMILY_NAMES:
        raise BadParamsError(f"unknown family {name!r}")
    n = check_points(field, d)
    rng = np.random.default_rng(family.seed)
    support = prm.get("support", "space")
    if name == "constant":
        return [("constant", constant(field, d))]
    if name == "delta":
        return [("delta", delta(field, d, Side.SpaceDX))]
    if name == "cone":
        return [("cone", build_cone(field, d).indicator())]
    if name == "subspace":
        search = max_subspace_in_cone(field, d, seed=family.seed)
        return [(f"subspace(dim={search.found_dim})", search.subspace.indicator())]
    if name == "custom":
        fns = prm.get("functions")
        if not fns:
            raise BadParamsError("custom family needs 'functions'")
        return [(f"custom[{i}]", as_function(v, field, d)) for i, v in enumerate(fns)]
    pts = _support_points(field, d, support)
    count = int(prm.get("count", 4 if name == "random" else 1))
    out = []
    if name == "random":
        size = int(prm.get("size", 0))
        if not 1 <= size <= pts.size:
            raise BadParamsError(f"random set size {size} outside [1, {pts.size}]")
        for k in range(count):
            chosen = np.sort(rng.choice(pts, size=size, replace=False))
            out.append((f"random(size={size})[{k}]", indicator(field, d, chosen)))
        return out
    levels = int(prm.get("levels", 0))
    if levels < 1:
        raise BadParamsError("dyadic family needs levels >= 1")
    sizes = dyadic_sizes(levels, float(prm.get("exponent", 2.0)), float(prm.get("scale", 1.0)),
                         pts.size)
    for k in range(count):
        order = rng.permutation(pts)
        vals = np.zeros(n)
        start = 0
        for i, s in enumerate(sizes):
            vals[order[start : start + s]] = 2.0**-i
            start += s
        out.append((f"dyadic(levels={levels})[{k}]", FunctionOnSpace(vals, Side.SpaceDX, field, d)))
    return out


def best_ratio(members, pair: ExponentPair, direction=Direction.FORWARD,
               cone: Variety | None = None) -> RatioResult:
    """Largest ratio over ``members``, a list of ``(id, function)`` pairs."""
    best = None
    for fid, fn in members:
        res = ratio(fn, pair, direction, cone, fid)
        if best is None or res.ratio > best.ratio:
            best = res
    if best is None:
        raise BadParamsError("empty family")
    return best


class RestrictedAveraging(TransformerMixin, BaseEstimator):
    """Restricted averaging operator to the cone of F_q^d, q = p^e.

    ``transform`` maps rows of length ``q^d`` (functions on dx, points in
    index order) to rows of length ``|C|`` (values on the cone, in
    ``cone_.points`` order).

    >>> op = RestrictedAveraging(p=3, e=1, d=3).fit()
    >>> op.transform(np.ones((1, 27))).real.round(12)[0, :3]
    array([1., 1., 1.])
    """

    def __init__(self, p: int = 3, e: int = 1, d: int = 4):
        self.p = p
        self.e = e
        self.d = d

    def fit(self, X=None, y=None):
        self.field_ = field_make(self.p, self.e)
        self.cone_ = build_cone(self.field_, self.d)
        self.n_features_in_ = self.field_.q**self.d
        if X is not None:
            check_function_array(X, self.n_features_in_)
        return self

    def _rows(self, X):
        check_is_fitted(self, "cone_")
        return check_function_array(X, self.n_features_in_)

    def transform(self, X):
        rows = self._rows(X)
        fns = (FunctionOnSpace(r, Side.SpaceDX, self.field_, self.d) for r in rows)
        return np.array([apply_restricted(f, self.cone_) for f in fns])

    def adjoint_transform(self, H):
        """Apply ``A_C^*`` to rows of ``|C|`` cone values."""
        check_is_fitted(self, "cone_")
        rows = check_function_array(H, self.cone_.cardinality, "H")
        return np.array([apply_adjoint(h, self.cone_).values for h in rows])

    def ratios(self, X, pair: ExponentPair, direction=Direction.FORWARD) -> np.ndarray:
        """Ratio per row; adjoint rows hold ``|C|`` cone values."""
        check_is_fitted(self, "cone_")
        if Direction(direction) is Direction.FORWARD:
            rows = check_function_array(X, self.n_features_in_)
        else:
            rows = check_function_array(X, self.cone_.cardinality)
        return np.array([ratio(r, pair, direction, self.cone_).ratio for r in rows])

    def operator_norm_l2(self, method: str = "svd") -> float:
        check_is_fitted(self, "cone_")
        return l2_opnorm(self.field_, self.d, method)
