from __future__ import annotations
import json
import math
import pathlib

import numpy as np
import pandas as pd

FLOAT_FORMAT = "%.17g"


def write_table(df: pd.DataFrame, out_path: pathlib.Path):
    out_path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(out_path, index=False, encoding="utf-8", float_format=FLOAT_FORMAT)


def _float(value: float) -> str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    text = FLOAT_FORMAT % value
    if "." not in text and "e" not in text:
        text += ".0"
    return text


def _plain(value):
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def _encode(value, level: int) -> str:
    pad = "  " * (level + 1)
    end = "  " * level
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _float(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(not isinstance(v, (list, dict)) for v in value):
            return "[" + ", ".join(_encode(v, level) for v in value) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, level + 1) for v in value) + "\n" + end + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = (pad + _encode(k, level) + ": " + _encode(v, level + 1) for k, v in value.items())
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot encode {type(value).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON text: insertion order, %.17g floats, [re, im] complex numbers."""
    return _encode(_plain(obj), 0) + "\n"


def write_json(obj, out_path: pathlib.Path):
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(dumps(obj), encoding="utf-8")
