import numpy as np
import pytest

import oracles
from conelab.exceptions import DimensionTooSmallError
from conelab.field import encode_points, field_from_q, field_make, gamma_form, point_coords
from conelab.varieties import (
    count_subspaces,
    cone,
    dual_cone,
    exhaustive_isotropic,
    kernel_K,
    kernel_M,
    max_subspace_in_cone,
    predicted_max_dim,
    rank,
    regularity_report,
    surface_measure,
)


@pytest.mark.parametrize("q,d", [(3, 3), (5, 3), (3, 4), (5, 4), (7, 4), (9, 3), (3, 5), (3, 6)])
def test_cone_size_against_brute_force_and_formula(q, d):
    f = field_from_q(q)
    c = cone(f, d)
    if q**d <= 3000:
        assert c.cardinality == oracles.naive_cone_size(f.p, f.e, d, f.modulus)
    assert c.cardinality == oracles.cone_size_formula(q, d, f.eta(f.neg(1)))


def test_smallest_cone():
    assert cone(field_make(3), 3).cardinality == 9


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11, 25])
def test_cone_is_symmetric_and_dilation_invariant(q):
    f = field_from_q(q)
    c = cone(f, 4)
    coords = point_coords(f, 4)[c.points]
    for s in (f.neg(1), 2 % f.p or 1):
        assert np.array_equal(np.sort(encode_points(f, f.mul(s, coords))), c.points)


def test_dual_cone_uses_gamma_form():
    f = field_make(5)
    dc = dual_cone(f, 4)
    coords = point_coords(f, 4)
    assert np.array_equal(np.flatnonzero(gamma_form(f, coords) == 0), dc.points)
    assert dc.cardinality == cone(f, 4).cardinality


def test_surface_measure_mass():
    c = cone(field_make(5), 4)
    mu = surface_measure(c)
    assert mu.total_mass == pytest.approx(1.0)
    assert mu.point_mass == pytest.approx(1 / c.cardinality)


@pytest.mark.parametrize("q,d", [(3, 3), (5, 4), (9, 4), (7, 6)])
def test_kernels(q, d):
    f = field_from_q(q)
    K, M = kernel_K(f, d), kernel_M(f, d)
    c = cone(f, d)
    assert K.values[0] == 0 and M.values[0] == 0
    np.testing.assert_allclose(K.values, M.values * q**d / c.cardinality, atol=1e-12)
    assert c.indicator_transform.values[0] == pytest.approx(c.cardinality / q**d)
    np.testing.assert_allclose(K.values.imag, 0, atol=1e-12)  # C = -C


def test_regularity_closed_form():
    f = field_make(7)
    assert regularity_report(cone(f, 3)).decay_ratio == pytest.approx(1.0)
    r4 = regularity_report(cone(f, 4))
    assert r4.decay_ratio == pytest.approx(7**0.5 - 7**-0.5)


@pytest.mark.parametrize("q,d,dim", [(3, 4, 1), (5, 4, 2), (7, 4, 1), (9, 4, 2), (3, 6, 3),
                                     (5, 6, 3), (3, 3, 1), (5, 5, 2)])
def test_subspace_dimensions(q, d, dim):
    f = field_from_q(q)
    search = max_subspace_in_cone(f, d)
    assert search.found_dim == dim == predicted_max_dim(f, d)
    assert search.subspace.inside_cone() and search.subspace.is_independent()


def test_no_plane_in_the_cone_for_q3_d4():
    f = field_make(3)
    found, checked = exhaustive_isotropic(f, 4, 2)
    assert found == [] and checked == count_subspaces(3, 4, 2) == 130
    search = max_subspace_in_cone(f, 4)
    assert search.exhaustive
    js = search.to_json()
    assert js["eta_minus_one"] == -1 and js["found_dim"] == 1 and js["predicted_max_dim"] == 1


def test_rank():
    f = field_make(5)
    assert rank(f, [[1, 2, 3], [2, 4, 2]]) == 2
    assert rank(f, [[1, 2, 3], [2, 4, 1]]) == 1


def test_low_dimension_rejected():
    with pytest.raises(DimensionTooSmallError):
        cone(field_make(3), 2)
