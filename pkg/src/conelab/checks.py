"""Named verifiers: exact identities and constant-stability checks.

An exact check evaluates an identity on seeded random inputs and reports
the largest residual.  A stability check measures ``LHS / shape`` for a
collection of test sets, keeps the largest value per ``q``, and fits the
log-log slope of that maximum across ``q``: a bounded constant shows up as
a slope near zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from conelab.exceptions import BadParamsError, ParityMismatchError, UnknownCheckError
from conelab.field import GF, dot, encode_points, field_from_q, gamma_form, point_coords
from conelab.fitting import DEFAULT_THRESHOLD, fit_slope, slope_verdict
from conelab.harmonic import (
    FunctionOnSpace,
    Side,
    chi,
    convolve,
    fourier_hat,
    indicator,
    inverse_fourier,
    weighted_norm,
)
from conelab.hull import critical_p1, critical_p2
from conelab.operators import (
    Direction,
    ExponentPair,
    TestFamily,
    apply_adjoint,
    apply_restricted,
    decompose_adjoint,
    decompose_forward,
    generate_family,
    ratio,
)
from conelab.varieties import (
    cone,
    dual_cone,
    kernel_K,
    kernel_M,
    max_subspace_in_cone,
    regularity_report,
    span_points,
)

EXACT_TOL = 1e-9
N_RANDOM = 20


@dataclass(frozen=True)
class VerdictRow:
    """Outcome of one check branch across a list of ``q``."""

    check_id: str
    d: int
    label: str
    qs: tuple[int, ...]
    constants: tuple[float, ...]
    slope: float | None
    verdict: str
    witnesses: tuple[str, ...] = ()
    pair: ExponentPair | None = None

    @property
    def residual(self) -> float | None:
        return max(self.constants) if self.verdict.startswith("exact") else None

    @property
    def failed(self) -> bool:
        return self.verdict not in ("stable", "exact-pass", "report-only")


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    kind: str  # "exact" or "slope"
    measure: Callable
    description: str
    dims: Callable[[int], bool] = lambda d: d >= 3
    even_only: bool = False
    dims_text: str = "d >= 3"


# --- seeded random inputs ---

def _rng(seed: int, *tags) -> np.random.Generator:
    return np.random.default_rng([seed, *tags])


def _random_values(rng, n: int) -> np.ndarray:
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def _random_dx(field: GF, d: int, rng) -> FunctionOnSpace:
    return FunctionOnSpace(_random_values(rng, field.q**d), Side.SpaceDX, field, d)


# --- exact identities: each returns the max residual over N_RANDOM inputs ---

def _fourier_inversion(field, d, rng):
    out = 0.0
    for _ in range(N_RANDOM):
        f = _random_dx(field, d, rng)
        g = FunctionOnSpace(_random_values(rng, f.values.size), Side.DualDM, field, d)
        out = max(out, np.abs(fourier_hat(inverse_fourier(f)).values - f.values).max(),
                  np.abs(inverse_fourier(fourier_hat(g)).values - g.values).max())
    return float(out)


def _plancherel(field, d, rng):
    out = 0.0
    for _ in range(N_RANDOM):
        f, g = _random_dx(field, d, rng), _random_dx(field, d, rng)
        fv, gv = inverse_fourier(f), inverse_fourier(g)
        lhs = np.sum(f.values * np.conj(g.values)) * f.weight
        out = max(out, abs(lhs - np.sum(fv.values * np.conj(gv.values))))
    return float(out)


def _convolution_theorem(field, d, rng):
    """Compare the transform-based convolution with direct sums at sampled points."""
    coords = point_coords(field, d)
    n = coords.shape[0]
    out = 0.0
    for _ in range(N_RANDOM):
        f, h = _random_dx(field, d, rng), _random_dx(field, d, rng)
        fast = convolve(f, h).values
        for y in rng.integers(0, n, size=4):
            shifted = encode_points(field, field.sub(coords[y][None, :], coords))
            direct = np.sum(f.values[shifted] * h.values) / n
            out = max(out, abs(fast[y] - direct))
    return float(out)


def _orthogonality(field, d, rng):
    """``sum_x chi(m.x) = q^d delta_0(m)``."""
    coords = point_coords(field, d)
    n = coords.shape[0]
    ms = np.concatenate([[0], rng.integers(0, n, size=N_RANDOM)])
    out = 0.0
    for m in ms:
        s = np.sum(chi(field, dot(field, coords, coords[m][None, :])))
        out = max(out, abs(s - (n if m == 0 else 0)))
    return float(out)


def _duality(field, d, rng):
    c = cone(field, d)
    out = 0.0
    for _ in range(N_RANDOM):
        f = _random_dx(field, d, rng)
        h = _random_values(rng, c.cardinality)
        lhs = np.mean(apply_restricted(f, c) * np.conj(h))
        rhs = np.sum(f.values * np.conj(apply_adjoint(h, c).values)) * f.weight
        out = max(out, abs(lhs - rhs))
    return float(out)


def _forward_decomposition(field, d, rng):
    c = cone(field, d)
    return max(decompose_forward(_random_dx(field, d, rng), c).residual for _ in range(N_RANDOM))


def _adjoint_decomposition(field, d, rng):
    c = cone(field, d)
    return max(decompose_adjoint(_random_values(rng, c.cardinality), c).residual
               for _ in range(N_RANDOM))


def _extension_identity(field, d, rng):
    """``||(f sigma)^v||_{L^2(dm)} = q^{d/2} |C|^{-1/2} ||f||_{L^2(C, sigma)}``."""
    c = cone(field, d)
    n = field.q**d
    out = 0.0
    for _ in range(N_RANDOM):
        fc = _random_values(rng, c.cardinality)
        full = np.zeros(n, dtype=complex)
        full[c.points] = fc * n / c.cardinality
        lhs = weighted_norm(inverse_fourier(FunctionOnSpace(full, Side.SpaceDX, field, d)).values, 1.0, 2)
        rhs = math.sqrt(n / c.cardinality) * weighted_norm(fc, 1.0 / c.cardinality, 2)
        out = max(out, abs(lhs - rhs))
    return float(out)


def _cone_reconstruction(field, d, rng):
    """``C(x) = M^(x) + |C|/q^d`` at every point."""
    c = cone(field, d)
    m_hat = fourier_hat(kernel_M(field, d)).values
    return float(np.abs(m_hat + c.cardinality / field.q**d - c.mask()).max())


def _kernel_origin(field, d, rng):
    """``K(0) = M(0) = 0`` and ``K = (q^d/|C|) M``."""
    c = cone(field, d)
    k, m = kernel_K(field, d).values, kernel_M(field, d).values
    scale = field.q**d / c.cardinality
    return float(max(abs(k[0]), abs(m[0]), np.abs(k - scale * m).max()))


# --- test sets for the stability checks ---

def regime_sizes(q: int, d: int) -> dict[str, int]:
    """Random-set sizes landing in the small, middle and large regimes."""
    return {
        "small": max(1, math.ceil(q ** ((d - 2) / 2) / 2)),
        "mid": math.isqrt(q ** (d - 1) - 1) + 1,
        "large": math.isqrt(q ** (d + 1) - 1) + 1,
    }


def _test_sets(field: GF, d: int, seed: int, on_cone: bool) -> list[tuple[str, np.ndarray]]:
    c = cone(field, d)
    sub = max_subspace_in_cone(field, d, seed=seed).subspace
    sets = [("point", np.array([0]))]
    if sub.dim > 1:
        sets.append(("line", span_points(field, sub.basis[:1], d)))
    sets += [(f"subspace(dim={sub.dim})", sub.points), ("cone", c.points)]
    pool = c.points if on_cone else np.arange(field.q**d)
    rng = _rng(seed, field.q, d, int(on_cone))
    for tag, size in regime_sizes(field.q, d).items():
        size = min(size, pool.size)
        for k in range(3):
            sets.append((f"random-{tag}(size={size})[{k}]", np.sort(rng.choice(pool, size, replace=False))))
    return sets


@dataclass(frozen=True)
class SetProfile:
    """Quantities measured once per test set and shared by the checks."""

    name: str
    size: int
    dual_cone_energy: float
    measure_energy: float
    norms: dict


def _forward_exponents(d: int) -> tuple[float, ...]:
    return (math.inf, 2.0) + (((d - 2) / 2,) if d >= 6 else ())


def _adjoint_exponents(d: int) -> tuple[float, ...]:
    extra = (10 / 3,) if d == 4 else ((d * d - 2 * d + 2) / (2 * d),)
    return (math.inf, 2.0) + extra


@lru_cache(maxsize=8)
def forward_profiles(field: GF, d: int, seed: int) -> tuple[SetProfile, ...]:
    """Profiles of ``E * K^`` on ``(C, sigma)`` for the forward test sets."""
    c = cone(field, d)
    on_dual = dual_cone(field, d).mask()
    sigma_v = c.measure_transform.values
    k = kernel_K(field, d).values
    out = []
    for name, pts in _test_sets(field, d, seed, on_cone=False):
        ev = inverse_fourier(indicator(field, d, pts)).values
        mag2 = np.abs(ev) ** 2
        g = fourier_hat(FunctionOnSpace(ev * k, Side.DualDM, field, d)).values[c.points]
        norms = {r: weighted_norm(g, 1.0 / c.cardinality, r) for r in _forward_exponents(d)}
        out.append(SetProfile(name, int(pts.size), float(mag2[on_dual].sum()),
                              float((mag2[1:] * np.abs(sigma_v[1:]) ** 2).sum()), norms))
    return tuple(out)


@lru_cache(maxsize=8)
def cone_profiles(field: GF, d: int, seed: int) -> tuple[SetProfile, ...]:
    """Profiles of ``F * M^`` on ``(F_q^d, dx)`` for subsets ``F`` of the cone."""
    m = kernel_M(field, d).values
    w = float(field.q) ** -d
    out = []
    for name, pts in _test_sets(field, d, seed, on_cone=True):
        fv = inverse_fourier(indicator(field, d, pts)).values
        g = fourier_hat(FunctionOnSpace(fv * m, Side.DualDM, field, d)).values
        norms = {r: weighted_norm(g, w, r) for r in _adjoint_exponents(d)}
        out.append(SetProfile(name, int(pts.size), math.nan, math.nan, norms))
    return tuple(out)


def _max_over(profiles, value, shape, keep=lambda s: True) -> dict:
    best = None
    for prof in profiles:
        if not keep(prof.size):
            continue
        c = value(prof) / shape(prof.size)
        if best is None or c > best[0]:
            best = (c, prof.name)
    if best is None:
        raise BadParamsError("no test set falls in the requested size range")
    return best


def _regimes(q: int, d: int) -> dict[str, Callable[[int], bool]]:
    lo, hi = q ** ((d - 2) / 2), q ** (d / 2)
    return {
        "large": lambda s: hi <= s,
        "mid": lambda s: lo <= s <= hi,
        "small": lambda s: s <= lo,
    }


# each stability measure returns {label: (constant, witness)}

def _kernel_decay(field, d, seed):
    q = field.q
    k = np.abs(kernel_K(field, d).values)
    null = gamma_form(field, point_coords(field, d)) == 0
    null[0] = False
    generic = ~null
    generic[0] = False
    return {
        "generic": (q ** (d / 2) * float(k[generic].max()), "max|K| off the dual cone"),
        "null": (q ** ((d - 2) / 2) * float(k[null].max()), "max|K| on the dual cone"),
    }


def _cone_regularity(field, d, seed):
    reg = regularity_report(cone(field, d))
    return {"size_ratio": (reg.size_ratio, "cone"), "decay_ratio": (reg.decay_ratio, "cone")}


def _fwd(field, d, seed):
    return forward_profiles(field, d, seed)


def _adj(field, d, seed):
    return cone_profiles(field, d, seed)


def _dual_cone_energy(field, d, seed):
    q = field.q
    return {"bound": _max_over(_fwd(field, d, seed), lambda p: p.dual_cone_energy,
                               lambda s: q ** (-d - 1) * s + q ** (-1.5 * d) * s * s)}


def _measure_energy(field, d, seed):
    q, prof = field.q, _fwd(field, d, seed)
    val = lambda p: p.measure_energy  # noqa: E731
    return {
        "flat": _max_over(prof, val, lambda s: q ** (-2 * d + 2) * s),
        "split": _max_over(prof, val, lambda s: q ** (-2 * d + 1) * s + q ** ((-5 * d + 4) / 2) * s * s),
    }


def _kernel_sup(field, d, seed):
    q = field.q
    return {"bound": _max_over(_fwd(field, d, seed), lambda p: p.norms[math.inf],
                               lambda s: s / q ** (d - 1))}


def _kernel_l2(field, d, seed):
    q, prof = field.q, _fwd(field, d, seed)
    val = lambda p: p.norms[2.0]  # noqa: E731
    return {
        "flat": _max_over(prof, val, lambda s: q ** ((-2 * d + 3) / 2) * s**0.5),
        "split": _max_over(prof, val, lambda s: q ** (-d + 1) * s**0.5 + q ** ((-5 * d + 6) / 4) * s),
    }


def _kernel_l2_power(field, d, seed):
    q = field.q
    return {"bound": _max_over(_fwd(field, d, seed), lambda p: p.norms[2.0],
                               lambda s: q ** (-d + 1) * s ** ((d + 2) / (2 * d)))}


def _kernel_l2_regimes(field, d, seed):
    q, prof = field.q, _fwd(field, d, seed)
    val = lambda p: p.norms[2.0]  # noqa: E731
    shapes = {
        "large": lambda s: q ** ((-2 * d + 3) / 2) * s**0.5,
        "mid": lambda s: q ** ((-5 * d + 6) / 4) * s,
        "small": lambda s: q ** (-d + 1) * s**0.5,
    }
    return {k: _max_over(prof, val, shapes[k], keep) for k, keep in _regimes(q, d).items()}


def _kernel_interpolated(field, d, seed):
    q, r = field.q, (d - 2) / 2
    return {"bound": _max_over(_fwd(field, d, seed), lambda p: p.norms[r],
                               lambda s: q ** (-d + 1) * s ** ((d - 2) / d))}


def _adjoint_sup(field, d, seed):
    q = field.q
    return {"bound": _max_over(_adj(field, d, seed), lambda p: p.norms[math.inf], lambda s: s / q**d)}


def _adjoint_l2(field, d, seed):
    q, prof = field.q, _adj(field, d, seed)
    val = lambda p: p.norms[2.0]  # noqa: E731
    return {
        "flat": _max_over(prof, val, lambda s: q ** (-d) * s**0.5),
        "split": _max_over(prof, val, lambda s: q ** ((-2 * d - 1) / 2) * s**0.5 + q ** (-1.25 * d) * s),
    }


def _adjoint_l2_regimes(field, d, seed):
    q, prof = field.q, _adj(field, d, seed)
    val = lambda p: p.norms[2.0]  # noqa: E731
    shapes = {
        "large": lambda s: q ** (-d) * s**0.5,
        "mid": lambda s: q ** (-1.25 * d) * s,
        "small": lambda s: q ** ((-2 * d - 1) / 2) * s**0.5,
    }
    return {k: _max_over(prof, val, shapes[k], keep) for k, keep in _regimes(q, d).items()}


def _adjoint_l2_power(field, d, seed):
    q = field.q
    return {"bound": _max_over(_adj(field, d, seed), lambda p: p.norms[2.0],
                               lambda s: q ** ((-2 * d - 1) / 2) * s ** ((d + 2) / (2 * d)))}


def _adjoint_interpolated(field, d, seed):
    q = field.q
    den = d * d - 2 * d + 2
    r = den / (2 * d)
    return {"bound": _max_over(
        _adj(field, d, seed), lambda p: p.norms[r],
        lambda s: s ** ((d * d - 4 * d + 6) / den) * q ** (-(d**3 - 2 * d * d + 4 * d) / den))}


def _adjoint_interpolated_d4(field, d, seed):
    q, prof = field.q, _adj(field, d, seed)
    val = lambda p: p.norms[10 / 3]  # noqa: E731
    shapes = {
        "large": lambda s: q**-4 * s**0.7,
        "mid": lambda s: q**-4.6 * s,
        "small": lambda s: q**-4.3 * s**0.7,
    }
    return {k: _max_over(prof, val, shapes[k], keep) for k, keep in _regimes(q, d).items()}


def endpoint_families(q: int, d: int, seed: int, support: str) -> list[TestFamily]:
    size = regime_sizes(q, d)["mid"]
    return [
        TestFamily("delta", {}, seed),
        TestFamily("cone", {}, seed),
        TestFamily("subspace", {}, seed),
        TestFamily("random", {"size": size, "count": 2, "support": support}, seed),
        TestFamily("dyadic", {"levels": 3, "count": 2, "support": support}, seed),
    ]


def _best_over_families(field, d, seed, pair, direction):
    c = cone(field, d)
    support = "space" if direction is Direction.FORWARD else "cone"
    best = None
    for fam in endpoint_families(field.q, d, seed, support):
        for member_id, f in generate_family(fam, field, d):
            value = ratio(f, pair, direction, cone=c, family_id=member_id).ratio
            if best is None or value > best[0]:
                best = (value, member_id)
    return best


def _forward_endpoint(field, d, seed):
    return {"best": _best_over_families(field, d, seed, critical_p1(d), Direction.FORWARD)}


def _adjoint_endpoint(field, d, seed):
    return {"best": _best_over_families(field, d, seed, critical_p2(d), Direction.ADJOINT)}


def _even_at_least(k):
    return lambda d: d >= k


_EXACT = [
    ("fourier-inversion", _fourier_inversion, "hat and inverse transforms undo each other"),
    ("plancherel", _plancherel, "inner products agree on dx and dm"),
    ("convolution-theorem", _convolution_theorem, "fast convolution matches direct sums"),
    ("orthogonality", _orthogonality, "character sums vanish off the origin"),
    ("duality", _duality, "<A f, h> on (C, sigma) equals <f, A* h> on dx"),
    ("forward-decomposition", _forward_decomposition, "A f = f*1 + f*K^ on the cone"),
    ("adjoint-decomposition", _adjoint_decomposition, "A* h splits into its M^ and mean parts"),
    ("extension-identity", _extension_identity, "L^2 norm of (f sigma)^v"),
    ("cone-reconstruction", _cone_reconstruction, "C = M^ + |C|/q^d"),
    ("kernel-origin", _kernel_origin, "K(0) = M(0) = 0 and K = (q^d/|C|) M"),
]

_SLOPE = [
    ("kernel-decay", _kernel_decay, "scaled max |K| on and off the dual cone", 4, None),
    ("cone-regularity", _cone_regularity, "size and Fourier-decay ratios of the cone", 3, None),
    ("dual-cone-energy", _dual_cone_energy, "energy of E^v on the dual cone", 4, None),
    ("measure-energy", _measure_energy, "energy of E^v sigma^v off the origin, both branches", 4, None),
    ("kernel-sup", _kernel_sup, "sup norm of E * K^ on the cone", 4, None),
    ("kernel-l2", _kernel_l2, "L^2 norm of E * K^ on the cone, both branches", 4, None),
    ("kernel-l2-power", _kernel_l2_power, "L^2 norm of E * K^ against one power of |E|", 4, None),
    ("kernel-l2-regimes", _kernel_l2_regimes, "L^2 norm of E * K^ in three size regimes", 4, None),
    ("kernel-interpolated", _kernel_interpolated, "L^{(d-2)/2} norm of E * K^", 6, None),
    ("adjoint-kernel-sup", _adjoint_sup, "sup norm of F * M^ for F in the cone", 4, None),
    ("adjoint-kernel-l2", _adjoint_l2, "L^2 norm of F * M^, both branches", 4, None),
    ("adjoint-kernel-l2-regimes", _adjoint_l2_regimes, "L^2 norm of F * M^ in three size regimes", 4, None),
    ("adjoint-kernel-l2-power", _adjoint_l2_power, "L^2 norm of F * M^ against one power of |F|", 4, None),
    ("adjoint-kernel-interpolated", _adjoint_interpolated,
     "L^{(d^2-2d+2)/(2d)} norm of F * M^", 6, None),
    ("adjoint-kernel-interpolated-d4", _adjoint_interpolated_d4,
     "L^{10/3} norm of F * M^ in three size regimes", 4, 4),
    ("forward-endpoint", _forward_endpoint, "best forward ratio at P_1", 6, None),
    ("adjoint-endpoint", _adjoint_endpoint, "best adjoint ratio at P_2", 4, None),
]


def _build_registry() -> dict[str, CheckSpec]:
    reg = {cid: CheckSpec(cid, "exact", fn, text) for cid, fn, text in _EXACT}
    for cid, fn, text, least, only in _SLOPE:
        even = cid != "cone-regularity"
        if only is not None:
            dims, dims_text = (lambda d, k=only: d == k), f"d = {only}"
        else:
            dims, dims_text = (lambda d, k=least: d >= k), f"d >= {least}"
        reg[cid] = CheckSpec(cid, "slope", fn, text, dims, even, dims_text + (", even" if even else ""))
    return reg


CHECKS: dict[str, CheckSpec] = _build_registry()

# q grids used when none is given.  Stability fits need q large enough for
# 1 - O(1/q) corrections in the measured constants to stay under the
# threshold; the d = 4 grid keeps -1 a square so a plane lies in the cone.
DEFAULT_QS = {
    "exact": (3, 5, 9),
    "cone-regularity": (3, 5, 7, 9),
    "forward-endpoint": (3, 5, 7),
}
_STABILITY_QS = {4: (25, 29, 37, 41), 6: (9, 11, 13)}
_ENDPOINT_QS = {4: (5, 9, 13, 17)}


def default_qs(check_id: str, d: int) -> tuple[int, ...]:
    spec = get_check(check_id)
    if spec.kind == "exact":
        return DEFAULT_QS["exact"]
    if check_id in DEFAULT_QS:
        return DEFAULT_QS[check_id]
    if check_id == "kernel-decay" and d == 4:
        return (3, 5, 7, 9, 11)
    if check_id == "adjoint-endpoint":
        return _ENDPOINT_QS.get(d, (3, 5, 7))
    return _STABILITY_QS.get(d, (3, 5, 7))


def get_check(check_id: str) -> CheckSpec:
    try:
        return CHECKS[check_id]
    except KeyError:
        raise UnknownCheckError(f"unknown check {check_id!r}; known: {', '.join(CHECKS)}") from None


def _validate_qs(qs) -> tuple[int, ...]:
    qs = tuple(int(q) for q in qs)
    if not qs:
        raise BadParamsError("empty q list")
    if any(b <= a for a, b in zip(qs, qs[1:])):
        raise BadParamsError(f"q list must be strictly increasing: {qs}")
    return qs


def verify(check_id: str, d: int, qs=None, seed: int = 0,
           threshold: float = DEFAULT_THRESHOLD) -> list[VerdictRow]:
    """Run one named check over ``qs`` and return one row per branch."""
    spec = get_check(check_id)
    if spec.even_only and d % 2:
        raise ParityMismatchError(f"{check_id} needs even d, got d={d}")
    if not spec.dims(d):
        raise BadParamsError(f"{check_id} needs {spec.dims_text}, got d={d}")
    qs = _validate_qs(default_qs(check_id, d) if qs is None else qs)
    fields = [field_from_q(q) for q in qs]

    if spec.kind == "exact":
        res = tuple(spec.measure(f, d, _rng(seed, f.q, d)) for f in fields)
        verdict = "exact-pass" if max(res) <= EXACT_TOL else "exact-fail"
        return [VerdictRow(check_id, d, "max-residual", qs, res, None, verdict)]

    per_q = [spec.measure(f, d, seed) for f in fields]
    rows = []
    for label in per_q[0]:
        consts = tuple(float(m[label][0]) for m in per_q)
        witnesses = tuple(m[label][1] for m in per_q)
        if len(qs) >= 3:
            slope = fit_slope(qs, consts)
            verdict = slope_verdict(slope, threshold)
        else:
            slope, verdict = None, "report-only"
        pair = {"forward-endpoint": critical_p1, "adjoint-endpoint": critical_p2}.get(check_id)
        rows.append(VerdictRow(check_id, d, label, qs, consts, slope, verdict, witnesses,
                               pair(d) if pair else None))
    return rows
