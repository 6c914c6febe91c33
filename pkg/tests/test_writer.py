from __future__ import annotations

import json

import numpy as np
import pandas as pd
import pytest

from grunskykit.writer import dumps, write_json, write_table


def test_dumps_is_deterministic() -> None:
    obj = {"b": [1.0, 2.5], "a": {"x": 0.1, "flag": True, "none": None}}
    assert dumps(obj) == dumps(obj)
    assert dumps(obj).index('"b"') < dumps(obj).index('"a"')


def test_dumps_formats() -> None:
    text = dumps({"complex": 1.0 + 2.0j, "float": 3.0, "tenth": 0.1, "int": np.int64(4), "array": np.arange(2)})
    data = json.loads(text)
    assert data == {"complex": [1.0, 2.0], "float": 3.0, "tenth": 0.1, "int": 4, "array": [0, 1]}
    assert '"float": 3.0' in text
    assert '"tenth": 0.10000000000000001' in text
    assert text.endswith("\n")


def test_dumps_nested_layout() -> None:
    text = dumps({"rows": [[1, 2], [3, 4]], "empty": [], "obj": {}})
    assert text == '{\n  "rows": [\n    [1, 2],\n    [3, 4]\n  ],\n  "empty": [],\n  "obj": {}\n}\n'


def test_dumps_non_finite() -> None:
    assert dumps([float("nan"), float("inf"), -float("inf")]) == "[NaN, Infinity, -Infinity]\n"


def test_dumps_rejects_unknown_types() -> None:
    with pytest.raises(TypeError):
        dumps({"value": object()})


def test_write_json_and_table(tmp_path) -> None:
    write_json({"status": "OK"}, tmp_path / "nested" / "audit.json")
    assert json.loads((tmp_path / "nested" / "audit.json").read_text(encoding="utf-8")) == {"status": "OK"}

    out = tmp_path / "tables" / "curve_0.csv"
    write_table(pd.DataFrame({"theta": [0.0, 0.5], "re": [1.0, 1.0 / 3.0]}), out)
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "theta,re"
    assert lines[2] == "0.5,0.33333333333333331"
