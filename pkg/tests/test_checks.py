import pytest

from conelab.checks import CHECKS, default_qs, get_check, regime_sizes, verify
from conelab.exceptions import BadParamsError, ParityMismatchError, UnknownCheckError

EXACT = sorted(k for k, spec in CHECKS.items() if spec.kind == "exact")


@pytest.mark.parametrize("check_id", EXACT)
def test_exact_checks_pass_at_d3(check_id):
    (row,) = verify(check_id, 3, qs=(3, 5))
    assert row.verdict == "exact-pass" and row.residual < 1e-9


def test_unknown_check():
    with pytest.raises(UnknownCheckError):
        get_check("no-such-check")


def test_parity_and_dimension_errors():
    with pytest.raises(ParityMismatchError):
        verify("kernel-sup", 5, qs=(3, 5, 7))
    with pytest.raises(BadParamsError):
        verify("kernel-interpolated", 4, qs=(3, 5, 7))
    with pytest.raises(BadParamsError):
        verify("kernel-sup", 4, qs=(7, 5, 3))


def test_too_few_q_is_report_only():
    rows = verify("kernel-decay", 4, qs=(3, 5))
    assert {r.verdict for r in rows} == {"report-only"}
    assert all(r.slope is None and not r.failed for r in rows)


def test_regularity_rows_are_deterministic():
    a = verify("cone-regularity", 3, qs=(3, 5, 7), seed=1)
    b = verify("cone-regularity", 3, qs=(3, 5, 7), seed=1)
    assert a == b
    decay = next(r for r in a if r.label == "decay_ratio")
    assert decay.constants == pytest.approx((1.0, 1.0, 1.0))
    assert decay.verdict == "stable"


def test_regime_sizes_are_ordered():
    for q in (3, 5, 25):
        s = regime_sizes(q, 4)
        assert s["small"] <= s["mid"] <= s["large"]


def test_default_grids():
    assert default_qs("fourier-inversion", 4) == (3, 5, 9)
    assert default_qs("kernel-decay", 4) == (3, 5, 7, 9, 11)
    assert all(q % 4 == 1 for q in default_qs("kernel-sup", 4))
