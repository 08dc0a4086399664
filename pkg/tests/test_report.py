import math

from hypothesis import given, strategies as st

from cstar.report import Check, Report, check, flag

ids = st.text("abcdefgh._[]0123456789", min_size=1, max_size=12)
residuals = st.floats(0, 10, allow_nan=False)


def test_empty_report_passes():
    r = Report("validate")
    assert r.passed and r.to_dict()["summary"] == "pass"


def test_failed_check_fails_report():
    r = Report("gns", [check("a", "x", 1.0, 0.5)])
    assert not r.passed and r.to_dict()["summary"] == "fail"


def test_nan_residual_fails():
    assert not check("a", "x", math.nan, 1.0).passed


def test_flag():
    assert flag("f", "d", True).passed and not flag("f", "d", False).passed


@given(st.lists(st.tuples(ids, residuals, residuals), max_size=6))
def test_json_round_trip(items):
    r = Report("tower", [Check(i, "desc", a, b, "anchor") for i, a, b in items], {"tower": 0.1},
               {"dims": [1, 2]})
    back = Report.from_json(r.to_json())
    assert back == r
    assert back.passed == all(a <= b for _, a, b in items)


def test_every_check_has_anchor_field():
    d = Report("x", [check("a", "b", 0, 1, "somewhere")]).to_dict()
    assert d["checks"][0]["anchor"] == "somewhere"
    assert d["version"] == 1


def test_text_output_lists_checks():
    txt = Report("x", [check("b", "second", 0, 1), check("a", "first", 2, 1)]).to_text()
    assert txt.startswith("x: FAIL")
    assert txt.index(" a:") < txt.index(" b:")
