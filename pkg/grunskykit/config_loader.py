from __future__ import annotations
import json
import pathlib
from dataclasses import fields, replace

import yaml

from .models import BoundaryFunction, LaurentMap, MapError, RunConfig, TaylorMap, Tolerances
from .rational import PoleTerm, RationalFunction
from .rigging import Rigging

COMMANDS = ("faber", "grunsky", "jump", "rigging-verify", "hs-norm", "report")


class ConfigError(ValueError):
    def __init__(self, message: str, kind: str = "config"):
        super().__init__(message)
        self.kind = kind


def _require(d: dict, key: str):
    if not isinstance(d, dict):
        raise ConfigError(f"Expected a mapping holding key: {key}")
    if key not in d:
        raise ConfigError(f"Missing key: {key}")
    return d[key]


def _int(value, name: str) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be an integer")
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be an integer") from None


def _float(value, name: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number") from None


def _complex(value, name: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        try:
            return complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError):
            pass
    raise ConfigError(f"{name} must be a number or a [re, im] pair")


def _complex_list(value, name: str) -> list[complex]:
    if not isinstance(value, list):
        raise ConfigError(f"{name} must be a list")
    return [_complex(v, f"{name}[{i}]") for i, v in enumerate(value)]


def read_document(path: str | pathlib.Path):
    path = pathlib.Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            return json.loads(text)
        return yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}", kind="parse") from exc


def load_map_from_raw(raw: dict) -> TaylorMap | LaurentMap:
    if not isinstance(raw, dict):
        raise ConfigError("map must be a mapping/object")
    kind = str(_require(raw, "kind")).lower()
    if kind not in ("taylor", "laurent"):
        raise ConfigError(f"Unsupported map kind: {kind}")
    coeffs = _complex_list(_require(raw, "coeffs"), "coeffs")
    if kind == "taylor":
        head = _complex(raw.get("center", 0.0), "center")
    else:
        head = _complex(_require(raw, "leading"), "leading")
    try:
        return TaylorMap(head, coeffs) if kind == "taylor" else LaurentMap(head, coeffs)
    except MapError as exc:
        raise ConfigError(str(exc), kind="validation") from exc


def load_rigging_from_raw(raw: dict) -> Rigging:
    if not isinstance(raw, dict):
        raise ConfigError("rigging must be a mapping/object")
    n = _int(_require(raw, "n"), "n")
    maps_raw = _require(raw, "maps")
    if not isinstance(maps_raw, list):
        raise ConfigError("maps must be a list")
    if len(maps_raw) != n + 1:
        raise ConfigError(f"n={n} needs {n + 1} maps, got {len(maps_raw)}")
    maps = [load_map_from_raw(m) for m in maps_raw]
    try:
        return Rigging(tuple(maps), _int(raw.get("sample_N", 1024), "sample_N"))
    except ValueError as exc:
        raise ConfigError(str(exc), kind="validation") from exc


def load_boundary_from_raw(raw: dict) -> BoundaryFunction:
    if not isinstance(raw, dict):
        raise ConfigError("boundary must be a mapping/object")
    K = _int(_require(raw, "K"), "K")
    fourier = _complex_list(_require(raw, "fourier"), "fourier")
    if len(fourier) != 2 * K + 1:
        raise ConfigError(f"fourier needs {2 * K + 1} entries for K={K}, got {len(fourier)}")
    return BoundaryFunction(None, fourier)


def load_rational_from_raw(raw: dict) -> RationalFunction:
    if not isinstance(raw, dict):
        raise ConfigError("rational must be a mapping/object")
    terms_raw = raw.get("terms", []) or []
    if not isinstance(terms_raw, list):
        raise ConfigError("terms must be a list")
    terms = []
    for i, t in enumerate(terms_raw):
        if not isinstance(t, dict):
            raise ConfigError(f"terms[{i}] must be a mapping/object")
        terms.append(PoleTerm(
            _complex(_require(t, "pole"), f"terms[{i}].pole"),
            _complex(_require(t, "residue"), f"terms[{i}].residue"),
            _int(t.get("order", 1), f"terms[{i}].order"),
        ))
    polynomial = _complex_list(raw.get("polynomial", []) or [], "polynomial")
    return RationalFunction(tuple(terms), polynomial)


def load_tolerances_from_raw(raw: dict | None, base: Tolerances | None = None) -> Tolerances:
    base = base or Tolerances()
    if not raw:
        return base
    if not isinstance(raw, dict):
        raise ConfigError("tolerances must be a mapping")
    known = {f.name for f in fields(Tolerances)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"Unknown tolerance: {sorted(unknown)[0]}")
    return replace(base, **{k: _float(v, k) for k, v in raw.items()})


def load_run_config_from_raw(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("Run config must be a mapping/object")
    command = str(_require(raw, "command"))
    if command not in COMMANDS:
        raise ConfigError(f"Unsupported command: {command}")
    return RunConfig(
        command=command,
        input_path=str(_require(raw, "input")),
        output_path=str(_require(raw, "output")),
        K=_int(raw.get("K", 8), "K"),
        N=_int(raw["N"], "N") if raw.get("N") is not None else None,
        tolerances=load_tolerances_from_raw(raw.get("tolerances")),
        seed=_int(raw.get("seed", 0), "seed"),
    )


def load_input(path: str | pathlib.Path):
    raw = read_document(path)
    if not isinstance(raw, dict):
        raise ConfigError("input must be a mapping/object")
    if "maps" in raw:
        return load_rigging_from_raw(raw)
    if "map" in raw:
        fmap = load_map_from_raw(raw["map"])
        if "boundary" in raw:
            return fmap, load_boundary_from_raw(raw["boundary"])
        if "rational" in raw:
            return fmap, load_rational_from_raw(raw["rational"])
        raise ConfigError("Missing key: boundary")
    return load_map_from_raw(raw)
