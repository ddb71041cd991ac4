import numpy as np
import pytest
from hypothesis import given, strategies as st
from sklearn.base import clone

from conelab.exceptions import BadParamsError
from conelab.fitting import PowerLawFit, fit_slope, slope_verdict

QS = st.lists(st.sampled_from([3, 5, 7, 9, 11, 13, 25, 27]), min_size=2, max_size=6, unique=True)


@given(QS, st.floats(-3, 3), st.floats(0.01, 100))
def test_recovers_exact_power_law(qs, slope, c):
    qs = sorted(qs)
    vals = [c * q**slope for q in qs]
    assert fit_slope(qs, vals) == pytest.approx(slope, abs=1e-9)


def test_fit_errors():
    with pytest.raises(BadParamsError):
        fit_slope([3], [1.0])
    with pytest.raises(BadParamsError):
        fit_slope([3, 5], [1.0, 0.0])


@pytest.mark.parametrize("slope,verdict", [(0.0, "stable"), (0.15, "stable"), (0.2, "growing"),
                                           (-0.2, "decaying")])
def test_verdicts(slope, verdict):
    assert slope_verdict(slope, 0.15) == verdict


def test_estimator():
    qs = np.array([3, 5, 7, 9])
    y = 2.0 * qs**0.25
    est = PowerLawFit(threshold=0.3).fit(qs.reshape(-1, 1), y)
    assert est.slope_ == pytest.approx(0.25)
    assert est.verdict_ == "stable"
    np.testing.assert_allclose(est.predict(qs.reshape(-1, 1)), y)
    assert clone(est).get_params() == {"threshold": 0.3}
