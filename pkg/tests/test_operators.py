from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.exceptions import NotFittedError

from conelab.exceptions import BadParamsError, TooLargeError, ZeroFunctionError
from conelab.field import encode_points, field_from_q, field_make, point_coords
from conelab.harmonic import FunctionOnSpace, Side, constant, delta
from conelab.operators import (
    Direction,
    ExponentPair,
    RestrictedAveraging,
    TestFamily,
    apply_adjoint,
    apply_restricted,
    decompose_adjoint,
    decompose_forward,
    dyadic_sizes,
    generate_family,
    l2_opnorm,
    ratio,
)
from conelab.varieties import cone


def direct_average(f: FunctionOnSpace, c) -> np.ndarray:
    """(A f)(y) = |C|^-1 sum_{x in C} f(y - x), summed directly."""
    field, d = f.field, f.d
    coords = point_coords(field, d)
    out = []
    for y in c.points:
        diff = encode_points(field, field.sub(coords[y][None, :], coords[c.points]))
        out.append(f.values[diff].mean())
    return np.array(out)


def rand_fn(field, d, rng):
    n = field.q**d
    return FunctionOnSpace(rng.standard_normal(n) + 1j * rng.standard_normal(n), Side.SpaceDX, field, d)


@pytest.mark.parametrize("q,d", [(3, 3), (5, 3), (3, 4), (9, 3)])
def test_operator_matches_direct_sum(q, d):
    field = field_from_q(q)
    c = cone(field, d)
    f = rand_fn(field, d, np.random.default_rng(q + d))
    np.testing.assert_allclose(apply_restricted(f, c), direct_average(f, c), atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([(3, 3), (5, 3), (3, 4), (5, 4), (9, 3)]), st.integers(0, 2**32 - 1))
def test_adjoint_duality(case, seed):
    q, d = case
    field = field_from_q(q)
    c = cone(field, d)
    rng = np.random.default_rng(seed)
    f = rand_fn(field, d, rng)
    h = rng.standard_normal(c.cardinality) + 1j * rng.standard_normal(c.cardinality)
    lhs = np.vdot(h, apply_restricted(f, c)) / c.cardinality
    rhs = np.vdot(apply_adjoint(h, c).values, f.values) / q**d
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(3, 3), (5, 4), (7, 3)]), st.integers(0, 2**32 - 1))
def test_decompositions_reassemble(case, seed):
    q, d = case
    field = field_from_q(q)
    c = cone(field, d)
    rng = np.random.default_rng(seed)
    f = rand_fn(field, d, rng)
    fw = decompose_forward(f, c)
    np.testing.assert_allclose(fw.mean_part + fw.oscillatory_part, direct_average(f, c), atol=1e-10)
    assert fw.residual < 1e-10
    np.testing.assert_allclose(fw.mean_part, f.values.mean())
    h = rng.standard_normal(c.cardinality)
    adj = decompose_adjoint(h, c)
    assert adj.residual < 1e-10
    np.testing.assert_allclose(adj.mean_part.values, h.sum() / c.cardinality)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10.0))
def test_ratio_is_scale_invariant(seed, scale):
    field = field_make(5)
    c = cone(field, 3)
    f = rand_fn(field, 3, np.random.default_rng(seed))
    pair = ExponentPair(Fraction(2, 3), Fraction(1, 4))
    a = ratio(f, pair, cone=c).ratio
    b = ratio(f * scale, pair, cone=c).ratio
    assert a == pytest.approx(b, rel=1e-10)


def test_known_ratios():
    field = field_make(5)
    c = cone(field, 4)
    pair = ExponentPair(Fraction(1, 2), Fraction(1, 3))
    assert ratio(constant(field, 4), pair, cone=c).ratio == pytest.approx(1.0)
    one_point = ExponentPair(0, 0)
    r = ratio(delta(field, 4, Side.SpaceDX), one_point, cone=c).ratio
    assert r == pytest.approx(1 / c.cardinality)
    with pytest.raises(ZeroFunctionError):
        ratio(constant(field, 4, 0.0), pair, cone=c)


def test_adjoint_ratio_of_cone_indicator():
    field = field_make(3)
    c = cone(field, 3)
    h = np.ones(c.cardinality)
    l1 = ratio(h, ExponentPair(0, 0), Direction.ADJOINT, cone=c).ratio
    assert l1 == pytest.approx(1.0)  # A^* 1_C has dx-mean 1
    sup = ratio(h, ExponentPair(1, 1), Direction.ADJOINT, cone=c).ratio
    assert sup == pytest.approx(27 / 9)  # peak at the origin is q^d / |C|


def test_exponent_pair():
    pair = ExponentPair.parse("5/6:1/4")
    assert pair == ExponentPair(Fraction(5, 6), Fraction(1, 4))
    assert pair.p == pytest.approx(1.2) and pair.r == 4.0
    assert pair.dual() == ExponentPair(Fraction(1, 6), Fraction(3, 4))
    assert ExponentPair(0, 0).p == float("inf")
    assert str(pair) == "5/6:1/4"
    with pytest.raises(BadParamsError):
        ExponentPair(2, 0)


@pytest.mark.parametrize("q,d", [(3, 3), (5, 3), (3, 4)])
def test_l2_norm_svd_and_power_agree(q, d):
    field = field_from_q(q)
    svd = l2_opnorm(field, d, "svd")
    power = l2_opnorm(field, d, "power")
    assert svd == pytest.approx(power, rel=1e-6)
    assert svd >= 1.0 - 1e-12  # constants attain 1


def test_l2_norm_limits():
    with pytest.raises(TooLargeError):
        l2_opnorm(field_make(11), 4)
    with pytest.raises(BadParamsError):
        l2_opnorm(field_make(3), 3, "lanczos")


def test_families_are_deterministic():
    field = field_make(5)
    fam = TestFamily("random", {"size": 10, "count": 3}, seed=7)
    a = generate_family(fam, field, 3)
    b = generate_family(fam, field, 3)
    assert [m for m, _ in a] == [f"random(size=10)[{k}]" for k in range(3)]
    for (_, f), (_, g) in zip(a, b):
        np.testing.assert_array_equal(f.values, g.values)
        assert np.count_nonzero(f.values) == 10
    other = generate_family(TestFamily("random", {"size": 10, "count": 3}, seed=8), field, 3)
    assert any(not np.array_equal(f.values, g.values) for (_, f), (_, g) in zip(a, other))


def test_family_support_and_errors():
    field = field_make(5)
    c = cone(field, 3)
    (_, f), = generate_family(TestFamily("random", {"size": 5, "count": 1, "support": "cone"}), field, 3)
    assert set(np.flatnonzero(f.values)) <= set(c.points.tolist())
    assert generate_family(TestFamily("subspace"), field, 4)[0][0] == "subspace(dim=2)"
    with pytest.raises(BadParamsError):
        generate_family(TestFamily("random", {"size": 0}), field, 3)
    with pytest.raises(BadParamsError):
        generate_family(TestFamily("sparkles"), field, 3)
    assert TestFamily("dyadic", {"levels": 3, "support": "cone"}).label == "dyadic(levels=3)"


def test_dyadic_sizes():
    assert dyadic_sizes(3, 2.0, 3.0, 100) == [1, 4, 16]
    assert sum(dyadic_sizes(4, 2.0, 4.0, 10)) <= 10


def test_transformer_api():
    op = RestrictedAveraging(p=3, e=1, d=3)
    with pytest.raises(NotFittedError):
        op.transform(np.ones((1, 27)))
    op.fit()
    X = np.random.default_rng(0).standard_normal((4, 27))
    Y = op.transform(X)
    assert Y.shape == (4, op.cone_.cardinality)
    c = op.cone_
    for x, y in zip(X, Y):
        f = FunctionOnSpace(x, Side.SpaceDX, c.field, 3)
        np.testing.assert_allclose(y, direct_average(f, c), atol=1e-12)
    assert op.adjoint_transform(Y).shape == (4, 27)
    pair = ExponentPair(Fraction(1, 2), Fraction(1, 2))
    assert op.ratios(X, pair).shape == (4,)
    assert op.operator_norm_l2() == pytest.approx(l2_opnorm(c.field, 3))
    assert op.get_params() == {"p": 3, "e": 1, "d": 3}
    with pytest.raises(ValueError):
        op.transform(np.ones((1, 26)))
