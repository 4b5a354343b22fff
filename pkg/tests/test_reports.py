import csv
import io
import json
from fractions import Fraction

import numpy as np

from khinchin_lab.reports import VerdictReport, format_reports, sig12, to_jsonable


def test_sig12_rounding():
    assert sig12(1.0) == 1.0
    assert sig12(1 / 3) == 0.333333333333
    assert sig12(123456789.123456789) == 123456789.123
    assert sig12(-2.5e-17) == -2.5e-17


def test_to_obj_key_order():
    rep = VerdictReport(claim="c", params={"b": 1, "a": 2}, passed=True,
                        margin=0.5, witness=None)
    obj = rep.to_obj()
    assert list(obj) == ["claim", "params", "pass", "margin", "witness"]
    assert obj["pass"] is True
    assert obj["witness"] is None


def test_jsonable_conversions():
    out = to_jsonable({
        "frac": Fraction(3, 4),
        "whole": Fraction(8, 2),
        "arr": np.array([1.0, 2.0]),
        "nested": [Fraction(1, 3), {"x": None, "y": False}],
        "f": 0.1 + 0.2,
    })
    assert out["frac"] == "3/4"
    assert out["whole"] == "4"
    assert out["arr"] == [1.0, 2.0]
    assert out["nested"][0] == "1/3"
    assert out["nested"][1] == {"x": None, "y": False}
    assert out["f"] == 0.3


def test_format_json_single_and_list():
    rep = VerdictReport("claim-a", {"p": 3}, True, 0.25, {"g": Fraction(1, 4)})
    single = json.loads(format_reports([rep], "json"))
    assert single["claim"] == "claim-a"
    assert single["witness"]["g"] == "1/4"
    many = json.loads(format_reports([rep, rep], "json"))
    assert isinstance(many, list) and len(many) == 2


def test_format_csv_layout():
    reps = [
        VerdictReport("c1", {"beta": 2, "alpha": 1}, True, 0.1, None),
        VerdictReport("c2", {"alpha": 3}, False, -0.2, {"note": 'say "hi"'}),
    ]
    lines = format_reports(reps, "csv").strip().split("\n")
    assert lines[0].split(",")[0] == "claim"
    header = lines[0].split(",")
    assert "param.alpha" in header and "param.beta" in header
    assert header.index("param.alpha") < header.index("param.beta")
    assert header[-3:] == ["pass", "margin", "witness"]
    # quotes in a witness cell survive the round trip
    rows = list(csv.reader(io.StringIO(format_reports(reps, "csv"))))
    cell = json.loads(rows[2][-1])
    assert cell == {"note": 'say "hi"'}
    assert rows[1][-1] == ""
