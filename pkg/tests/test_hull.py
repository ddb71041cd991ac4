from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conelab.exceptions import BadParamsError, DimensionTooSmallError
from conelab.hull import (
    CaseId,
    HullCase,
    Position,
    case_for_dimension,
    convex_hull,
    critical_p0,
    critical_p1,
    critical_p2,
    hull_classify,
)
from conelab.operators import ExponentPair

DIMS = [3, 4, 5, 6, 8, 11]


def test_critical_points_d6():
    assert critical_p0(6) == ExponentPair(F(5, 6), F(1, 6))
    assert critical_p1(6) == ExponentPair(F(5, 6), F(1, 4))
    assert critical_p2(6) == ExponentPair(F(10, 13), F(2, 13))


@pytest.mark.parametrize("case", list(CaseId))
@pytest.mark.parametrize("d", DIMS)
def test_vertices_and_edge_midpoints_are_boundary(case, d):
    hull = HullCase.build(case, d)
    for v in hull.vertices:
        assert hull.classify(v) is Position.BOUNDARY
    poly = hull.polygon()
    for a, b in zip(poly, poly[1:] + poly[:1]):
        mid = ExponentPair((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        assert hull.classify(mid) is Position.BOUNDARY
    assert hull.classify(hull.centroid()) is Position.INSIDE


@pytest.mark.parametrize("d", [4, 6, 8])
def test_half_dim_hull_has_five_vertices_and_excludes_p0(d):
    hull = HullCase.build(CaseId.HALF_DIM_SUBSPACE, d)
    assert len(hull.polygon()) == 5
    assert hull.classify(critical_p0(d)) is Position.OUTSIDE


def test_no_large_hull_contains_half_dim_hull():
    for d in DIMS:
        big = HullCase.build(CaseId.NO_LARGE_SUBSPACE, d)
        for v in HullCase.build(CaseId.HALF_DIM_SUBSPACE, d).vertices:
            assert big.classify(v) is not Position.OUTSIDE


@given(st.fractions(0, 1), st.fractions(0, 1), st.sampled_from(DIMS))
def test_classification_consistent_with_hull_of_added_point(x, y, d):
    hull = HullCase.build(CaseId.NO_LARGE_SUBSPACE, d)
    pos = hull.classify(ExponentPair(x, y))
    grown = convex_hull(hull.polygon() + [(x, y)])
    assert (pos is Position.OUTSIDE) == (grown != hull.polygon())


def test_examples():
    assert hull_classify(ExponentPair(1, F(1, 2)), 6, "HalfDimSubspace") is Position.OUTSIDE
    assert hull_classify(ExponentPair(F(1, 2), F(1, 2)), 6, CaseId.HALF_DIM_SUBSPACE) is Position.INSIDE
    assert hull_classify(ExponentPair(0, F(1, 2)), 3, "NoLargeSubspace") is Position.BOUNDARY


def test_case_for_dimension():
    assert case_for_dimension(6, 3) is CaseId.HALF_DIM_SUBSPACE
    assert case_for_dimension(4, 1) is CaseId.NO_LARGE_SUBSPACE
    with pytest.raises(BadParamsError):
        case_for_dimension(4, 3)
    with pytest.raises(DimensionTooSmallError):
        HullCase.build(CaseId.NO_LARGE_SUBSPACE, 2)
    with pytest.raises(BadParamsError):
        hull_classify(ExponentPair(0, 0), 5, HullCase.build(CaseId.NO_LARGE_SUBSPACE, 4))
