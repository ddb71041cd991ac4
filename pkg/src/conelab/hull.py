"""Exact convex hulls of the admissible exponent region.

Vertices are rational points ``(1/p, 1/r)`` in the unit square; every test
is a sign check on integer cross products, so classification never rounds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from conelab.exceptions import BadParamsError, DimensionTooSmallError
from conelab.operators import ExponentPair


class CaseId(str, enum.Enum):
    NO_LARGE_SUBSPACE = "NoLargeSubspace"
    HALF_DIM_SUBSPACE = "HalfDimSubspace"


class Position(str, enum.Enum):
    INSIDE = "Inside"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


def _check_d(d: int) -> None:
    if d < 3:
        raise DimensionTooSmallError(f"d must be at least 3, got {d}")


def critical_p0(d: int) -> ExponentPair:
    return ExponentPair(Fraction(d - 1, d), Fraction(1, d))


def critical_p1(d: int) -> ExponentPair:
    return ExponentPair(Fraction(d - 1, d), Fraction(1, d - 2))


def critical_p2(d: int) -> ExponentPair:
    den = d * d - 2 * d + 2
    return ExponentPair(Fraction(d * d - 3 * d + 2, den), Fraction(d - 2, den))


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list[tuple[Fraction, Fraction]]:
    """Counter-clockwise hull vertices, collinear points dropped (monotone chain)."""
    pts = sorted(set((Fraction(x), Fraction(y)) for x, y in points))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for pt in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], pt) <= 0:
            lower.pop()
        lower.append(pt)
    upper: list = []
    for pt in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], pt) <= 0:
            upper.pop()
        upper.append(pt)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class HullCase:
    """The necessary-condition region for one subspace case in dimension ``d``."""

    case_id: CaseId
    d: int
    vertices: tuple[ExponentPair, ...]

    @classmethod
    def build(cls, case_id, d: int) -> "HullCase":
        _check_d(d)
        case_id = CaseId(case_id)
        corners = [ExponentPair(0, 0), ExponentPair(0, 1), ExponentPair(Fraction(d - 1, d), 1)]
        if case_id is CaseId.NO_LARGE_SUBSPACE:
            corners.append(critical_p0(d))
        else:
            corners += [critical_p1(d), critical_p2(d)]
        return cls(case_id, d, tuple(corners))

    def polygon(self) -> list[tuple[Fraction, Fraction]]:
        return convex_hull((v.inv_p, v.inv_r) for v in self.vertices)

    def centroid(self) -> ExponentPair:
        """Area centroid, exact."""
        poly = self.polygon()
        area2 = Fraction(0)
        cx = cy = Fraction(0)
        for (x0, y0), (x1, y1) in zip(poly, poly[1:] + poly[:1]):
            w = x0 * y1 - x1 * y0
            area2 += w
            cx += (x0 + x1) * w
            cy += (y0 + y1) * w
        return ExponentPair(cx / (3 * area2), cy / (3 * area2))

    def classify(self, pair: ExponentPair) -> Position:
        poly = self.polygon()
        pt = (pair.inv_p, pair.inv_r)
        on_edge = False
        for a, b in zip(poly, poly[1:] + poly[:1]):
            c = _cross(a, b, pt)
            if c < 0:
                return Position.OUTSIDE
            if c == 0:
                on_edge = True
        return Position.BOUNDARY if on_edge else Position.INSIDE


def case_for_dimension(d: int, subspace_dim: int) -> CaseId:
    """``HalfDimSubspace`` exactly when a ``d/2``-dimensional subspace lies in the cone."""
    _check_d(d)
    if 2 * subspace_dim > d:
        raise BadParamsError(f"a {subspace_dim}-dimensional subspace cannot lie in the cone")
    return CaseId.HALF_DIM_SUBSPACE if 2 * subspace_dim == d else CaseId.NO_LARGE_SUBSPACE


def hull_classify(pair: ExponentPair, d: int, case) -> Position:
    if not isinstance(case, HullCase):
        case = HullCase.build(case, d)
    elif case.d != d:
        raise BadParamsError(f"hull built for d={case.d}, asked about d={d}")
    return case.classify(pair)
