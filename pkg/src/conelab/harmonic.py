"""Functions on (F_q^d, dx) and (F_q^d, dm) and the Fourier transforms between them.

The additive group of F_q^d is (Z/p)^{e d}.  Writing elements in the
power basis, ``Tr(a b)`` is the bilinear form ``digits(a)^T T digits(b)``
with ``T`` the trace-form matrix, so the character sum
``sum_x chi(m . x) f(x)`` equals a plain (Z/p)^{e d} DFT of ``f``
evaluated at the relabelled frequency ``tau(m) = T digits(m)``.  The DFT
runs as ``e*d`` passes of a length-p transform, one per digit axis.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from conelab.exceptions import (
    BadExponentError,
    EmptyVarietyError,
    SideMismatchError,
    SpecMismatchError,
    WrongSideError,
)
from conelab.field import GF, check_points, field_make, point_coords


class Side(enum.Enum):
    SpaceDX = "dx"
    DualDM = "dm"


@dataclass(frozen=True, eq=False)
class FunctionOnSpace:
    """Dense complex function on F_q^d, tagged with its measure side.

    ``values[i]`` is the value at the point with index ``i``.  The array is
    copied and frozen on construction.
    """

    values: np.ndarray
    side: Side
    field: GF
    d: int

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128)
        n = self.field.q**self.d
        if vals.shape != (n,):
            raise ValueError(f"expected {n} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("function values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def weight(self) -> float:
        """Measure of one point: ``q^-d`` on dx, ``1`` on dm."""
        return self.q ** -self.d if self.side is Side.SpaceDX else 1.0

    def with_values(self, values) -> "FunctionOnSpace":
        return FunctionOnSpace(values, self.side, self.field, self.d)

    def __add__(self, other):
        _check_compatible(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _check_compatible(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, FunctionOnSpace):
            _check_compatible(self, other)
            return self.with_values(self.values * other.values)
        return self.with_values(self.values * other)

    __rmul__ = __mul__


def _check_compatible(f: FunctionOnSpace, g: FunctionOnSpace):
    if f.field is not g.field or f.d != g.d:
        raise SpecMismatchError("functions live on different spaces")
    if f.side is not g.side:
        raise SideMismatchError(f"{f.side.name} vs {g.side.name}")


def zeros(field: GF, d: int, side: Side = Side.SpaceDX) -> FunctionOnSpace:
    return FunctionOnSpace(np.zeros(check_points(field, d)), side, field, d)


def constant(field: GF, d: int, c=1.0, side: Side = Side.SpaceDX) -> FunctionOnSpace:
    return FunctionOnSpace(np.full(check_points(field, d), c, dtype=complex), side, field, d)


def delta(field: GF, d: int, side: Side = Side.DualDM, at: int = 0) -> FunctionOnSpace:
    vals = np.zeros(check_points(field, d), dtype=complex)
    vals[at] = 1.0
    return FunctionOnSpace(vals, side, field, d)


def indicator(field: GF, d: int, points, side: Side = Side.SpaceDX) -> FunctionOnSpace:
    vals = np.zeros(check_points(field, d), dtype=complex)
    vals[np.asarray(points, dtype=np.int64)] = 1.0
    return FunctionOnSpace(vals, side, field, d)


def chi(field: GF, a):
    """Additive character ``exp(2 pi i Tr(a) / p)``."""
    out = np.exp(2j * np.pi * field.trace_table[a] / field.p)
    return complex(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=32)
def _frequency_perm(field: GF, d: int) -> np.ndarray:
    """Index of the (Z/p)^{ed} frequency ``tau(m)`` for every point ``m``."""
    tau = (field.digits @ field.trace_form) % field.p  # T symmetric
    tau_elem = tau @ (field.p ** np.arange(field.e))
    coords = point_coords(field, d)
    perm = tau_elem[coords] @ (field.q ** np.arange(d, dtype=np.int64))
    perm.setflags(write=False)
    return perm


@lru_cache(maxsize=16)
def _dft_matrix(p: int, sign: int) -> np.ndarray:
    k = np.arange(p)
    return np.exp(sign * 2j * np.pi * np.outer(k, k) / p)


def zp_dft(values: np.ndarray, p: int, n: int, sign: int) -> np.ndarray:
    """``out[k] = sum_x exp(sign 2 pi i k.x / p) values[x]`` over (Z/p)^n.

    Indices are base-p little-endian digit vectors.  Each pass contracts one
    digit axis with the p x p DFT matrix; passes run in a fixed order so the
    result is bit-reproducible.
    """
    w = _dft_matrix(p, sign)
    arr = np.asarray(values, dtype=np.complex128)
    for j in range(n):
        arr = arr.reshape(p ** (n - j - 1), p, p**j)
        arr = np.matmul(w, arr)
    return arr.reshape(-1)


def _n_digits(f: FunctionOnSpace) -> int:
    return f.field.e * f.d


def fourier_hat(g: FunctionOnSpace) -> FunctionOnSpace:
    """``g^(x) = sum_m chi(-m.x) g(m)``, mapping dm functions to dx functions."""
    if g.side is not Side.DualDM:
        raise WrongSideError("fourier_hat expects a function on (F_q^d, dm)")
    perm = _frequency_perm(g.field, g.d)
    arr = np.empty_like(g.values)
    arr[perm] = g.values
    out = zp_dft(arr, g.field.p, _n_digits(g), -1)
    return FunctionOnSpace(out, Side.SpaceDX, g.field, g.d)


def inverse_fourier(f: FunctionOnSpace) -> FunctionOnSpace:
    """``f^v(m) = q^-d sum_x chi(m.x) f(x)``, mapping dx functions to dm functions."""
    if f.side is not Side.SpaceDX:
        raise WrongSideError("inverse_fourier expects a function on (F_q^d, dx)")
    perm = _frequency_perm(f.field, f.d)
    out = zp_dft(f.values, f.field.p, _n_digits(f), +1)[perm] * f.q ** -f.d
    return FunctionOnSpace(out, Side.DualDM, f.field, f.d)


def convolve(f: FunctionOnSpace, h: FunctionOnSpace) -> FunctionOnSpace:
    """``(f*h)(y) = q^-d sum_x f(y-x) h(x)`` via the convolution theorem."""
    _check_compatible(f, h)
    if f.side is not Side.SpaceDX:
        raise WrongSideError("convolution is defined on (F_q^d, dx)")
    return fourier_hat(inverse_fourier(f) * inverse_fourier(h))


def _as_exponent(p) -> float:
    if isinstance(p, Fraction):
        p = float(p)
    if p != math.inf and not p >= 1:
        raise BadExponentError(f"exponent must lie in [1, inf], got {p}")
    return float(p)


def weighted_norm(values, weight: float, p) -> float:
    """``(weight * sum |v|^p)^(1/p)``; ``p = inf`` gives ``max |v|``."""
    p = _as_exponent(p)
    a = np.abs(np.asarray(values))
    if a.size == 0:
        return 0.0
    top = float(a.max())
    if p == math.inf or top == 0.0:
        return top
    s = float(np.sum((a / top) ** p))
    return top * (weight * s) ** (1.0 / p)


def lp_norm(f: FunctionOnSpace, p) -> float:
    return weighted_norm(f.values, f.weight, p)


def surface_norm(f: FunctionOnSpace, variety, r) -> float:
    """``(|V|^-1 sum_{x in V} |f(x)|^r)^(1/r)``."""
    if variety.cardinality == 0:
        raise EmptyVarietyError("variety has no points")
    return weighted_norm(f.values[variety.points], 1.0 / variety.cardinality, r)


def inner(f: FunctionOnSpace, g: FunctionOnSpace) -> complex:
    _check_compatible(f, g)
    return complex(np.sum(f.values * np.conj(g.values)) * f.weight)


# --- CSV ---

def write_function_csv(f: FunctionOnSpace, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["p", "e", "d", "side"])
        w.writerow([f.field.p, f.field.e, f.d, f.side.value])
        w.writerow(["index", "re", "im"])
        for i, v in enumerate(f.values):
            w.writerow([i, repr(float(v.real)), repr(float(v.imag))])


def read_function_csv(path) -> FunctionOnSpace:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["p", "e", "d", "side"] or rows[2] != ["index", "re", "im"]:
        raise ValueError(f"{path}: not a function CSV")
    p, e, d = (int(x) for x in rows[1][:3])
    side = Side(rows[1][3])
    field = field_make(p, e)
    vals = np.zeros(field.q**d, dtype=complex)
    for i, re, im in rows[3:]:
        vals[int(i)] = complex(float(re), float(im))
    return FunctionOnSpace(vals, side, field, d)
