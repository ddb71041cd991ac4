"""Cones, comparison varieties, surface measures, kernels and isotropic subspaces."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np

from conelab.exceptions import DimensionTooSmallError, EmptyVarietyError
from conelab.field import (
    GF,
    bilinear,
    check_points,
    cone_form,
    encode_points,
    gamma_form,
    point_coords,
)
from conelab.harmonic import FunctionOnSpace, Side, indicator, inverse_fourier

KINDS = ("cone", "dual_cone", "paraboloid", "sphere")


@dataclass(frozen=True, eq=False)
class Variety:
    kind: str
    points: np.ndarray
    field: GF
    d: int
    radius: int | None = None

    @property
    def cardinality(self) -> int:
        return int(self.points.size)

    @property
    def q(self) -> int:
        return self.field.q

    def mask(self) -> np.ndarray:
        m = np.zeros(self.q**self.d, dtype=bool)
        m[self.points] = True
        return m

    def indicator(self) -> FunctionOnSpace:
        return indicator(self.field, self.d, self.points, Side.SpaceDX)

    @cached_property
    def indicator_transform(self) -> FunctionOnSpace:
        """``V^v``, the inverse Fourier transform of the indicator."""
        return inverse_fourier(self.indicator())

    @cached_property
    def measure_transform(self) -> FunctionOnSpace:
        """``sigma_V^v = (q^d / |V|) V^v``."""
        return self.indicator_transform * (self.q**self.d / self.cardinality)

    def __contains__(self, index) -> bool:
        i = np.searchsorted(self.points, index)
        return bool(i < self.points.size and self.points[i] == index)


def _sum_squares(field: GF, coords):
    sq = field.square_table[coords]
    out = sq[:, 0]
    for i in range(1, sq.shape[1]):
        out = field.add(out, sq[:, i])
    return out


def build_variety(field: GF, d: int, kind: str = "cone", radius: int = 1) -> Variety:
    """Scan all of F_q^d and collect the points of the requested variety.

    ``paraboloid`` is ``x_d = x_1^2 + ... + x_{d-1}^2`` and ``sphere`` is
    ``x_1^2 + ... + x_d^2 = radius`` (a field element index).
    """
    if kind not in KINDS:
        raise ValueError(f"unknown variety kind {kind!r}")
    least = 3 if kind in ("cone", "dual_cone") else 2
    if d < least:
        raise DimensionTooSmallError(f"{kind} needs d >= {least}, got {d}")
    check_points(field, d)
    coords = point_coords(field, d)
    if kind == "cone":
        mask = cone_form(field, coords) == 0
    elif kind == "dual_cone":
        mask = gamma_form(field, coords) == 0
    elif kind == "paraboloid":
        mask = _sum_squares(field, coords[:, :-1]) == coords[:, -1]
    else:
        mask = _sum_squares(field, coords) == radius
    points = np.flatnonzero(mask).astype(np.int64)
    points.setflags(write=False)
    return Variety(kind, points, field, d, radius if kind == "sphere" else None)


@lru_cache(maxsize=32)
def cone(field: GF, d: int) -> Variety:
    return build_variety(field, d, "cone")


@lru_cache(maxsize=32)
def dual_cone(field: GF, d: int) -> Variety:
    return build_variety(field, d, "dual_cone")


@dataclass(frozen=True, eq=False)
class SurfaceMeasure:
    """Normalized counting measure on a variety.

    Viewed as a density against dx it is ``(q^d / |V|) * 1_V``.
    """

    variety: Variety

    @property
    def point_mass(self) -> float:
        return 1.0 / self.variety.cardinality

    @property
    def density_on_dx(self) -> float:
        v = self.variety
        return v.q**v.d / v.cardinality

    @property
    def total_mass(self) -> float:
        return self.point_mass * self.variety.cardinality

    def as_function(self) -> FunctionOnSpace:
        return self.variety.indicator() * self.density_on_dx

    def integrate(self, f: FunctionOnSpace) -> complex:
        return complex(np.sum(f.values[self.variety.points]) * self.point_mass)


def surface_measure(variety: Variety) -> SurfaceMeasure:
    if variety.cardinality == 0:
        raise EmptyVarietyError(f"{variety.kind} is empty")
    return SurfaceMeasure(variety)


@lru_cache(maxsize=32)
def kernel_K(field: GF, d: int) -> FunctionOnSpace:
    """``K = sigma^v - delta_0`` for the cone measure; ``K(0) = 0``."""
    vals = cone(field, d).measure_transform.values.copy()
    vals[0] = 0.0
    return FunctionOnSpace(vals, Side.DualDM, field, d)


@lru_cache(maxsize=32)
def kernel_M(field: GF, d: int) -> FunctionOnSpace:
    """``M = C^v - (|C|/q^d) delta_0``; ``M(0) = 0``."""
    vals = cone(field, d).indicator_transform.values.copy()
    vals[0] = 0.0
    return FunctionOnSpace(vals, Side.DualDM, field, d)


class Regularity(NamedTuple):
    size_ratio: float
    decay_ratio: float


def regularity_report(variety: Variety) -> Regularity:
    """``|V| / q^(d-1)`` and ``q^((d+1)/2) max_{m != 0} |V^v(m)|``."""
    if variety.cardinality == 0:
        raise EmptyVarietyError(f"{variety.kind} is empty")
    q, d = variety.q, variety.d
    ft = np.abs(variety.indicator_transform.values[1:])
    return Regularity(variety.cardinality / q ** (d - 1), q ** ((d + 1) / 2) * float(ft.max()))


# --- linear algebra over F_q ---

def rank(field: GF, rows) -> int:
    """Rank of a small matrix over F_q by Gaussian elimination."""
    m = [list(map(int, r)) for r in rows]
    if not m:
        return 0
    ncols, r = len(m[0]), 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = int(field.inv(m[r][c]))
        m[r] = [int(field.mul(inv, x)) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [int(field.sub(x, field.mul(f, y))) for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def span_points(field: GF, basis: np.ndarray, d: int) -> np.ndarray:
    """Sorted indices of every F_q-combination of the rows of ``basis``."""
    basis = np.asarray(basis, dtype=np.int64).reshape(-1, d)
    k = basis.shape[0]
    if k == 0:
        return np.zeros(1, dtype=np.int64)
    coeffs = point_coords(field, k)
    vec = field.mul(coeffs[:, 0:1], basis[0][None, :])
    for i in range(1, k):
        vec = field.add(vec, field.mul(coeffs[:, i : i + 1], basis[i][None, :]))
    return np.unique(encode_points(field, vec))


@dataclass(frozen=True, eq=False)
class Subspace:
    basis: np.ndarray
    field: GF
    d: int
    points: np.ndarray = dc_field(init=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.int64).reshape(-1, self.d)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        pts = span_points(self.field, b, self.d)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    def is_independent(self) -> bool:
        return rank(self.field, self.basis) == self.dim

    def inside_cone(self) -> bool:
        coords = point_coords(self.field, self.d)[self.points]
        return bool(np.all(cone_form(self.field, coords) == 0))

    def indicator(self) -> FunctionOnSpace:
        return indicator(self.field, self.d, self.points, Side.SpaceDX)


def predicted_max_dim(field: GF, d: int) -> int:
    """Dimension of a maximal subspace of the cone (Witt index of its form)."""
    if d % 2:
        return (d - 1) // 2
    em1 = field.eta(field.neg(1))
    return d // 2 if em1 == em1 ** (d // 2) else (d - 2) // 2


def _two_squares_to_minus_one(field: GF) -> tuple[int, int]:
    m1 = int(field.neg(1))
    for a in range(field.q):
        b = field.sqrt(int(field.sub(m1, field.square_table[a])))
        if b is not None:
            return a, b
    raise AssertionError("every element is a sum of two squares")  # pragma: no cover


def structured_isotropic_basis(field: GF, d: int) -> np.ndarray:
    """Pairing construction of a large subspace inside the cone.

    The hyperbolic pair (x_{d-1}, x_d) contributes ``e_{d-1}``.  The sum of
    squares splits into pairs ``e_i + s e_{i+1}`` when ``s^2 = -1`` exists,
    otherwise into blocks of four (two vectors each, built from
    ``a^2 + b^2 = -1``) with one extra vector from a leftover block of three.
    """
    if d < 3:
        raise DimensionTooSmallError(f"cone needs d >= 3, got {d}")
    n = d - 2
    rows = []

    def unit(entries):
        v = [0] * d
        for i, c in entries:
            v[i] = int(c)
        rows.append(v)

    unit([(d - 2, 1)])
    s = field.sqrt(int(field.neg(1)))
    if s is not None:
        for i in range(0, n - 1, 2):
            unit([(i, 1), (i + 1, s)])
    else:
        a, b = _two_squares_to_minus_one(field)
        j = 0
        while j + 4 <= n:
            unit([(j, a), (j + 1, b), (j + 2, 1)])
            unit([(j, b), (j + 1, field.neg(a)), (j + 3, 1)])
            j += 4
        if n - j >= 3:
            unit([(j, a), (j + 1, b), (j + 2, 1)])
    return np.array(rows, dtype=np.int64)


def _rref_candidates(field: GF, d: int, k: int):
    """Yield every k-dimensional subspace of F_q^d as a batch of RREF bases."""
    q = field.q
    for pivots in itertools.combinations(range(d), k):
        free = [(i, j) for i, pc in enumerate(pivots) for j in range(pc + 1, d) if j not in pivots]
        n = q ** len(free)
        base = np.zeros((k, d), dtype=np.int64)
        for i, pc in enumerate(pivots):
            base[i, pc] = 1
        batch = np.broadcast_to(base, (n, k, d)).copy()
        if free:
            fill = point_coords(field, len(free)) if len(free) else None
            for t, (i, j) in enumerate(free):
                batch[:, i, j] = fill[:, t]
        yield batch


def count_subspaces(q: int, d: int, k: int) -> int:
    """Gaussian binomial coefficient ``[d choose k]_q``."""
    num = den = 1
    for i in range(k):
        num *= q ** (d - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _isotropic_mask(field: GF, batch: np.ndarray) -> np.ndarray:
    ok = np.all(cone_form(field, batch) == 0, axis=1)
    k = batch.shape[1]
    for i in range(k):
        for j in range(i + 1, k):
            ok &= bilinear(field, batch[:, i], batch[:, j]) == 0
    return ok


def exhaustive_isotropic(field: GF, d: int, k: int):
    """All k-dim subspaces inside the cone, plus the number examined."""
    found, checked = [], 0
    for batch in _rref_candidates(field, d, k):
        checked += batch.shape[0]
        found.extend(batch[_isotropic_mask(field, batch)])
    return found, checked


def greedy_isotropic(field: GF, d: int, rng: np.random.Generator, trials: int = 8) -> np.ndarray:
    """Randomized greedy extension through cone points orthogonal to the basis."""
    coords = point_coords(field, d)[cone(field, d).points[1:]]
    best = np.zeros((0, d), dtype=np.int64)
    for _ in range(trials):
        basis = np.zeros((0, d), dtype=np.int64)
        cand = coords
        while cand.shape[0]:
            span = span_points(field, basis, d)
            cand = cand[~np.isin(encode_points(field, cand), span)]
            if not cand.shape[0]:
                break
            v = cand[rng.integers(cand.shape[0])]
            basis = np.vstack([basis, v])
            cand = cand[bilinear(field, cand, v[None, :]) == 0]
        if basis.shape[0] > best.shape[0]:
            best = basis
    return best


@dataclass(frozen=True)
class SubspaceSearch:
    subspace: Subspace
    predicted_dim: int
    method: str
    exhaustive: bool
    n_checked: int
    budget_exceeded: bool

    @property
    def found_dim(self) -> int:
        return self.subspace.dim

    def to_json(self) -> dict:
        f = self.subspace.field
        return {
            "p": f.p,
            "e": f.e,
            "d": self.subspace.d,
            "eta_minus_one": f.eta(f.neg(1)),
            "predicted_max_dim": self.predicted_dim,
            "found_dim": self.found_dim,
            "basis": self.subspace.basis.tolist(),
            "exhaustive": self.exhaustive,
        }


def max_subspace_in_cone(field: GF, d: int, budget: int = 200_000, seed: int = 0) -> SubspaceSearch:
    """Largest subspace inside the cone found within ``budget``.

    Runs the structured construction first.  If that falls short of the
    ``floor(d/2)`` ceiling, every subspace of the next dimension is checked
    when their number fits in ``budget``; otherwise a seeded randomized greedy
    extension runs and ``budget_exceeded`` is set.  The returned basis is
    always re-verified point by point.
    """
    check_points(field, d)
    basis = structured_isotropic_basis(field, d)
    method, exhaustive, checked, exceeded = "structured", False, 0, False
    ceiling = d // 2
    k = basis.shape[0] + 1
    while k <= ceiling:
        if count_subspaces(field.q, d, k) <= budget:
            found, n = exhaustive_isotropic(field, d, k)
            checked += n
            if not found:
                exhaustive = True
                break
            basis, method = found[0], "exhaustive"
            k += 1
        else:
            exceeded = True
            greedy = greedy_isotropic(field, d, np.random.default_rng(seed))
            if greedy.shape[0] > basis.shape[0]:
                basis, method = greedy, "greedy"
            break
    sub = Subspace(basis, field, d)
    if not (sub.is_independent() and sub.inside_cone()):
        raise AssertionError("subspace search produced an invalid subspace")
    return SubspaceSearch(sub, predicted_max_dim(field, d), method, exhaustive, checked,
                          exceeded and sub.dim < ceiling)
