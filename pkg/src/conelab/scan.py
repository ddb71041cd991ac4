"""Exponent scans: best operator ratios across q for a grid of exponent pairs.

A config file is plain ``key = value`` lines; ``#`` starts a comment.
Recognized keys::

    d = 6
    qs = 3, 5, 7
    pairs = 5/6:1/4; 10/13:2/13
    families = constant, delta, cone, subspace, random, dyadic
    direction = forward
    seed = 0
    threshold = 0.15
    mode = check            # or: conjecture
    out = scan.csv
    format = csv
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from conelab.checks import regime_sizes
from conelab.exceptions import BadParamsError, ConeLabError
from conelab.field import field_from_q
from conelab.fitting import DEFAULT_THRESHOLD, fit_slope
from conelab.hull import CaseId, HullCase, Position, case_for_dimension, critical_p0, critical_p1, critical_p2
from conelab.operators import (
    FAMILY_NAMES,
    Direction,
    ExponentPair,
    TestFamily,
    generate_family,
    ratio,
)
from conelab.varieties import cone, max_subspace_in_cone

SCAN_FAMILIES = ("constant", "delta", "cone", "subspace", "random", "dyadic")


@dataclass(frozen=True)
class ScanConfig:
    d: int
    qs: tuple[int, ...]
    pairs: tuple[ExponentPair, ...]
    families: tuple[str, ...] = SCAN_FAMILIES
    direction: Direction = Direction.FORWARD
    seed: int = 0
    threshold: float = DEFAULT_THRESHOLD
    mode: str = "check"
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.d < 3:
            raise BadParamsError(f"d must be at least 3, got {self.d}")
        if len(self.qs) < 3:
            raise BadParamsError("a scan needs at least three values of q")
        if any(b <= a for a, b in zip(self.qs, self.qs[1:])):
            raise BadParamsError(f"q list must be strictly increasing: {self.qs}")
        for q in self.qs:
            field_from_q(q)  # rejects even or non-prime-power q
        if not self.pairs:
            raise BadParamsError("no exponent pairs given")
        bad = [f for f in self.families if f not in FAMILY_NAMES or f == "custom"]
        if bad or not self.families:
            raise BadParamsError(f"unsupported families: {bad or 'none given'}")
        if self.mode not in ("check", "conjecture"):
            raise BadParamsError(f"mode must be 'check' or 'conjecture', got {self.mode!r}")
        if self.format not in ("csv", "json"):
            raise BadParamsError(f"format must be csv or json, got {self.format!r}")
        object.__setattr__(self, "direction", Direction(self.direction))


def _split(text: str, sep: str = ",") -> list[str]:
    return [t.strip() for t in text.split(sep) if t.strip()]


def _parse_value(key: str, raw: str):
    if key in ("d", "seed"):
        return int(raw)
    if key == "threshold":
        return float(raw)
    if key == "qs":
        return tuple(int(x) for x in _split(raw))
    if key == "pairs":
        return tuple(ExponentPair.parse(x) for x in _split(raw, ";"))
    if key == "families":
        return tuple(_split(raw))
    return raw.strip()


_KEYS = {f.name for f in dataclasses.fields(ScanConfig)}


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadParamsError(f"line {lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise BadParamsError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _parse_value(key, raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise BadParamsError(f"line {lineno}: bad value for {key}: {exc}") from None
    return values


def load_config(path=None, **overrides) -> ScanConfig:
    """Read ``path`` (optional) and apply non-None ``overrides`` on top."""
    values = parse_config_text(Path(path).read_text()) if path is not None else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "d" not in values:
        raise BadParamsError("scan config needs d")
    if "qs" not in values:
        raise BadParamsError("scan config needs qs")
    if "pairs" not in values:
        values["pairs"] = default_pairs(values["d"])
    return ScanConfig(**values)


def default_pairs(d: int) -> tuple[ExponentPair, ...]:
    """Vertices, critical points, the centroid and two points off the hull.

    Even ``d`` uses the half-dimensional-subspace hull (nine pairs, including
    an edge midpoint and ``P_0``, which lies outside it); odd ``d`` uses the
    hull with ``P_0`` as its critical vertex.
    """
    corner = ExponentPair(Fraction(d - 1, d), 1)
    if d % 2:
        p0 = critical_p0(d)
        centroid = HullCase.build(CaseId.NO_LARGE_SUBSPACE, d).centroid()
        return (ExponentPair(0, 0), corner, p0, centroid,
                ExponentPair(1, Fraction(1, 2)), ExponentPair(p0.inv_p, p0.inv_r / 2))
    p1, p2 = critical_p1(d), critical_p2(d)
    mid = ExponentPair((p1.inv_p + p2.inv_p) / 2, (p1.inv_r + p2.inv_r) / 2)
    centroid = HullCase.build(CaseId.HALF_DIM_SUBSPACE, d).centroid()
    return (ExponentPair(0, 0), corner, p1, p2, mid, centroid, critical_p0(d),
            ExponentPair(1, Fraction(1, 2)), ExponentPair(p2.inv_p, p2.inv_r / 2))


@dataclass(frozen=True)
class FamilyCurve:
    family: str
    ratios: tuple[float, ...]
    witnesses: tuple[str, ...]
    slope: float


@dataclass(frozen=True)
class PairResult:
    """Everything a scan learns about one exponent pair."""

    pair: ExponentPair
    position: Position
    curves: tuple[FamilyCurve, ...]
    best: tuple[float, ...]
    best_slope: float
    witness_slope: float
    witness_family: str
    verdict: str
    note: str = ""

    @property
    def agrees(self) -> bool | None:
        if self.verdict in ("agree", "disagree"):
            return self.verdict == "agree"
        return None


@dataclass(frozen=True)
class ScanResult:
    config: ScanConfig
    case: CaseId
    qs: tuple[int, ...]
    results: tuple[PairResult, ...]
    errors: tuple[str, ...] = ()

    @property
    def all_agree(self) -> bool:
        return bool(self.results) and not self.errors and all(r.agrees is not False for r in self.results)


def _family_specs(cfg: ScanConfig, q: int) -> list[TestFamily]:
    support = "space" if cfg.direction is Direction.FORWARD else "cone"
    specs = []
    for name in cfg.families:
        params: dict = {}
        if name == "random":
            params = {"size": regime_sizes(q, cfg.d)["mid"], "count": 2, "support": support}
        elif name == "dyadic":
            params = {"levels": 3, "count": 2, "support": support}
        specs.append(TestFamily(name, params, cfg.seed))
    return specs


def _scan_case(cfg: ScanConfig) -> CaseId:
    cases = set()
    for q in cfg.qs:
        try:
            dim = max_subspace_in_cone(field_from_q(q), cfg.d, seed=cfg.seed).found_dim
        except ConeLabError:
            continue  # reported per q by the scan itself
        cases.add(case_for_dimension(cfg.d, dim))
    if len(cases) > 1:
        raise BadParamsError(
            f"q list {cfg.qs} mixes subspace cases; pick q values with the same sign of eta(-1)")
    return cases.pop() if cases else CaseId.NO_LARGE_SUBSPACE


def _is_open_endpoint(cfg: ScanConfig, pair: ExponentPair) -> bool:
    return cfg.d == 4 and pair == critical_p1(4)


def exponent_scan(cfg: ScanConfig) -> ScanResult:
    """Best ratio per family, pair and ``q``; slopes; hull agreement.

    A ``q`` whose functions cannot be built (too many points, say) is
    recorded in ``errors`` and dropped; slopes use the remaining values.
    """
    case = _scan_case(cfg)
    hull = HullCase.build(case, cfg.d)
    # per q: {pair: {family: (best value, member id)}}
    per_q: dict[int, dict] = {}
    errors = []
    for q in cfg.qs:
        field = field_from_q(q)
        try:
            c = cone(field, cfg.d)
            members = [(fam.name, mid, f) for fam in _family_specs(cfg, q)
                       for mid, f in generate_family(fam, field, cfg.d)]
        except ConeLabError as exc:
            errors.append(f"q={q}: {exc}")
            continue
        per_q[q] = {}
        for pair in cfg.pairs:
            best: dict[str, tuple[float, str]] = {}
            for name, mid, f in members:
                val = ratio(f, pair, cfg.direction, cone=c, family_id=mid).ratio
                if name not in best or val > best[name][0]:
                    best[name] = (val, mid)
            per_q[q][pair] = best
    qs = tuple(per_q)
    if len(qs) < 3:
        return ScanResult(cfg, case, qs, (), tuple(errors))

    results = []
    for pair in cfg.pairs:
        curves = []
        for name in cfg.families:
            vals = tuple(per_q[q][pair][name][0] for q in qs)
            ids = tuple(per_q[q][pair][name][1] for q in qs)
            curves.append(FamilyCurve(name, vals, ids, fit_slope(qs, vals)))
        best = tuple(max(c.ratios[i] for c in curves) for i in range(len(qs)))
        best_slope = fit_slope(qs, best)
        witness = max(curves, key=lambda c: c.slope)
        position = hull.classify(pair)
        note = ""
        if cfg.mode == "conjecture":
            verdict, note = "report-only", "conjecture exploration"
        elif _is_open_endpoint(cfg, pair):
            verdict, note = "report-only", "open - exploration only"
        elif position is Position.OUTSIDE:
            verdict = "agree" if witness.slope >= cfg.threshold else "disagree"
        else:
            verdict = "agree" if best_slope <= cfg.threshold else "disagree"
        results.append(PairResult(pair, position, tuple(curves), best, best_slope,
                                  witness.slope, witness.family, verdict, note))
    return ScanResult(cfg, case, qs, tuple(results), tuple(errors))
