import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thickknot import make_torus_knot, read_knot, write_knot
from thickknot.io import (KnotFormatError, dumps_csv, dumps_report, knot_from_json,
                          knot_from_xyz, knot_to_json, knot_to_xyz, loads_csv)


@pytest.mark.parametrize("suffix", [".json", ".xyz"])
def test_round_trip_is_exact(tmp_path, suffix):
    k = make_torus_knot(2, 3, n=64)
    path = tmp_path / ("k" + suffix)
    write_knot(k, path, {"seed": 1})
    back = read_knot(path)
    assert back.vertices.tobytes() == k.vertices.tobytes()


@settings(max_examples=100)
@given(st.floats(allow_nan=False, allow_infinity=False, width=64))
def test_number_format_round_trips(x):
    from thickknot.io import _num
    assert float(_num(x)) == x


def test_json_layout():
    k = make_torus_knot(2, 3, n=16)
    data = json.loads(knot_to_json(k, {"n": 16}))
    assert data["schema"] == 1
    assert data["name"] == k.name
    assert data["config"] == {"n": 16}
    assert len(data["vertices"]) == 16


def test_bad_inputs():
    with pytest.raises(KnotFormatError):
        knot_from_json("{not json")
    with pytest.raises(KnotFormatError):
        knot_from_json('{"name": "x"}')
    with pytest.raises(KnotFormatError):
        knot_from_xyz("0 0 0\n1 0\n")
    with pytest.raises(KnotFormatError):
        knot_from_xyz("0 0 zero\n")


def test_xyz_skips_comments():
    k = knot_from_xyz("# a triangle\n0 0 0\n\n1 0 0\n0 1 0\n")
    assert k.n == 3


def test_report_serialisation():
    text = dumps_report({"a": np.float64(1.5), "b": np.inf, "c": [np.int64(2)], "d": np.bool_(True)})
    data = json.loads(text)
    assert data == {"schema": 1, "a": 1.5, "b": "inf", "c": [2], "d": True}


def test_csv_round_trip():
    text = dumps_csv(["x", "y"], [(1.0, 2.5), (3.0, 0.1)], {"k": 1})
    assert text.startswith("# schema: 1\n# config: {\"k\": 1}\n")
    header, rows = loads_csv(text)
    assert header == ["x", "y"]
    assert float(rows[1][1]) == 0.1
