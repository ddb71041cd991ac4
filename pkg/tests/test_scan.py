from fractions import Fraction

import pytest

from conelab.exceptions import BadParamsError, ConeLabError
from conelab.hull import CaseId, Position
from conelab.operators import ExponentPair
from conelab.scan import default_pairs, exponent_scan, load_config, parse_config_text


def test_parse_config(tmp_path):
    text = """
    # comment
    d = 6
    qs = 3, 5, 7
    pairs = 5/6:1/4; 10/13:2/13
    families = constant, delta
    mode = conjecture   # trailing comment
    """
    vals = parse_config_text(text)
    assert vals["qs"] == (3, 5, 7)
    assert vals["pairs"][1] == ExponentPair(Fraction(10, 13), Fraction(2, 13))
    path = tmp_path / "scan.cfg"
    path.write_text(text)
    cfg = load_config(path, qs=(3, 5, 9), seed=4)
    assert cfg.qs == (3, 5, 9) and cfg.seed == 4 and cfg.mode == "conjecture"
    assert cfg.families == ("constant", "delta")


@pytest.mark.parametrize("text", ["d = 6\nbogus = 1", "d = six", "just words"])
def test_bad_config_lines(text):
    with pytest.raises(BadParamsError):
        parse_config_text(text)


@pytest.mark.parametrize("overrides", [dict(d=6, qs=(3, 5)), dict(d=6, qs=(5, 3, 7)),
                                       dict(d=6, qs=(3, 5, 7), families=("custom",)),
                                       dict(d=6, qs=(3, 5, 6)), dict(d=6, qs=(3, 5, 7), format="xml"),
                                       dict(qs=(3, 5, 7))])
def test_bad_configs(overrides):
    with pytest.raises(ConeLabError):
        load_config(**overrides)


def test_default_pairs():
    assert len(default_pairs(6)) == 9 and len(default_pairs(5)) == 6


def test_mixed_subspace_cases_rejected():
    with pytest.raises(BadParamsError):
        exponent_scan(load_config(d=4, qs=(3, 5, 7)))


def test_small_scan():
    cfg = load_config(d=3, qs=(3, 5, 7), pairs=(ExponentPair(0, 0), ExponentPair(1, Fraction(1, 2))))
    res = exponent_scan(cfg)
    assert res.case is CaseId.NO_LARGE_SUBSPACE and res.all_agree
    origin, outside = res.results
    assert origin.position is Position.BOUNDARY
    assert origin.best_slope == pytest.approx(0.0, abs=1e-9)
    assert outside.position is Position.OUTSIDE and outside.witness_slope >= 0.15


def test_open_endpoint_and_conjecture_are_report_only():
    from conelab.hull import critical_p1

    res = exponent_scan(load_config(d=4, qs=(5, 13, 17), pairs=(critical_p1(4),)))
    (row,) = res.results
    assert row.verdict == "report-only" and row.note.startswith("open")
    res = exponent_scan(load_config(d=3, qs=(3, 5, 7), pairs=(ExponentPair(0, 0),), mode="conjecture"))
    assert res.results[0].agrees is None
