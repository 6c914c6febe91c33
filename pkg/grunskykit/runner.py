from __future__ import annotations
import logging
import pathlib
from dataclasses import replace

import numpy as np
import pandas as pd

from .cauchy import jump_decompose
from .config_loader import ConfigError, load_input
from .curves import is_simple, sample_curve, signed_area, winding_number
from .faber import faber_polynomials, faber_polynomials_exterior
from .grunsky import (
    grunsky_hs_norm, grunsky_hs_partial_sums, grunsky_via_faber, grunsky_via_generating,
)
from .models import BoundaryFunction, CurveSample, LaurentMap, RunConfig, TaylorMap
from .rational import RationalFunction, random_rational
from .rigging import (
    Rigging, apply_K, assemble_grunsky_blocks, check_budget, hilbert_schmidt_norm,
    hs_partial_sums, singular_values, validate_rigging, verify_graph, wf_identity_report,
)
from .spaces import chord_arc_constant
from .writer import write_json, write_table

logger = logging.getLogger(__name__)

DEFAULT_N = 1024
GRAPH_TEST_FUNCTIONS = 3


class ToleranceError(ValueError):
    def __init__(self, message: str, result: dict):
        super().__init__(message)
        self.result = result


def _curve_frame(curve: CurveSample) -> pd.DataFrame:
    return pd.DataFrame({
        "theta": curve.theta,
        "re": curve.points.real,
        "im": curve.points.imag,
    })


def _write_curves(out_dir: pathlib.Path, curves) -> None:
    for i, curve in enumerate(curves):
        write_table(_curve_frame(curve), out_dir / f"curve_{i}.csv")


def _finish(cfg: RunConfig, out_dir: pathlib.Path, counts: dict, failures: list[str]) -> dict:
    status = "OK" if not failures else "TOLERANCE"
    audit = {"command": cfg.command, "status": status, "counts": counts}
    if failures:
        audit["failures"] = failures
    write_json(audit, out_dir / "audit.json")
    result = {"status": status, "output_dir": str(out_dir)}
    if failures:
        raise ToleranceError("; ".join(failures), result)
    logger.info("%s finished: %s", cfg.command, out_dir)
    return result


def _check(failures: list[str], name: str, value: float, bound: float) -> None:
    if not value <= bound:
        failures.append(f"{name} {value:.3e} above {bound:.3e}")


def _resolve_N(cfg: RunConfig, fallback: int = DEFAULT_N) -> int:
    N = cfg.N if cfg.N is not None else fallback
    check_budget(cfg.K, N)
    return N


def _kind_name(kinds) -> str:
    kinds = kinds if isinstance(kinds, tuple) else (kinds,)
    return " or ".join(k.__name__ for k in kinds)


def _expect(obj, kinds, what: str):
    if not isinstance(obj, kinds):
        raise ConfigError(f"{_kind_name(kinds)} input required for {what}", kind="validation")
    return obj


def cmd_faber(cfg: RunConfig) -> dict:
    fmap = _expect(load_input(cfg.input_path), (TaylorMap, LaurentMap), "faber")
    N = _resolve_N(cfg)
    out_dir = pathlib.Path(cfg.output_path)
    curve = sample_curve(fmap, N)
    if isinstance(fmap, LaurentMap):
        family = faber_polynomials(fmap, cfg.K)
    else:
        family = faber_polynomials_exterior(fmap, cfg.K)
    write_json({"map": fmap.to_raw(), "family": family.to_raw()}, out_dir / "faber.json")
    _write_curves(out_dir, [curve])
    return _finish(cfg, out_dir, {"polynomials": len(family.polys), "curves": 1}, [])


def cmd_grunsky(cfg: RunConfig) -> dict:
    fmap = _expect(load_input(cfg.input_path), LaurentMap, "grunsky")
    N = _resolve_N(cfg)
    out_dir = pathlib.Path(cfg.output_path)
    generating = grunsky_via_generating(fmap, cfg.K)
    composed = grunsky_via_faber(fmap, cfg.K)
    agreement = float(np.max(np.abs(generating.entries - composed.entries)))
    symmetry = generating.symmetry_residual()
    write_json({
        "map": fmap.to_raw(),
        "generating": generating.to_raw(),
        "faber": composed.to_raw(),
        "symmetry_residual": symmetry,
        "weighted_symmetry_residual": generating.weighted_symmetry_residual(),
        "agreement": agreement,
        "hs_norm": grunsky_hs_norm(generating),
    }, out_dir / "grunsky.json")
    _write_curves(out_dir, [sample_curve(fmap, N)])
    failures: list[str] = []
    _check(failures, "symmetry", symmetry, cfg.tolerances.symmetry)
    _check(failures, "agreement", agreement, cfg.tolerances.agreement)
    return _finish(cfg, out_dir, {"K": cfg.K, "curves": 1}, failures)


def _split_rational(h: RationalFunction, curve: CurveSample) -> tuple[RationalFunction, RationalFunction]:
    inside = []
    outside = []
    for term in h.terms:
        (inside if winding_number(curve.points, term.pole)[0] != 0 else outside).append(term)
    return RationalFunction(tuple(outside), h.polynomial), RationalFunction(tuple(inside))


def cmd_jump(cfg: RunConfig) -> dict:
    loaded = load_input(cfg.input_path)
    if not isinstance(loaded, tuple):
        raise ConfigError("jump input needs a map and boundary data", kind="validation")
    fmap, data = loaded
    N = _resolve_N(cfg)
    out_dir = pathlib.Path(cfg.output_path)
    curve = sample_curve(fmap, N)
    if isinstance(data, RationalFunction):
        u = data.trace(curve)
    else:
        u = BoundaryFunction(curve, data.fourier)
    jump = jump_decompose(curve, u)
    values = u.samples if u.samples is not None else u.sample_values(N)
    pointwise = np.abs(jump.u_plus.samples - jump.u_minus.samples - values)
    result = {
        "N": N,
        "residual": jump.residual,
        "u_plus": jump.u_plus.to_raw(),
        "u_minus": jump.u_minus.to_raw(),
    }
    failures: list[str] = []
    _check(failures, "plemelj", jump.residual, cfg.tolerances.plemelj)
    if isinstance(data, RationalFunction):
        interior, exterior = _split_rational(data, curve)
        oracle = max(
            float(np.max(np.abs(jump.u_plus.samples - interior(curve.points)))),
            float(np.max(np.abs(jump.u_minus.samples + exterior(curve.points)))),
        )
        result["oracle_error"] = oracle
        _check(failures, "oracle", oracle, cfg.tolerances.plemelj)
    write_json(result, out_dir / "jump.json")
    write_table(pd.DataFrame({"theta": curve.theta, "residual": pointwise}), out_dir / "residual.csv")
    _write_curves(out_dir, [curve])
    return _finish(cfg, out_dir, {"samples": N, "curves": 1}, failures)


def _load_rigging(cfg: RunConfig, loaded=None) -> Rigging:
    loaded = load_input(cfg.input_path) if loaded is None else loaded
    r = _expect(loaded, Rigging, cfg.command)
    N = _resolve_N(cfg, r.sample_N)
    return r if N == r.sample_N else replace(r, sample_N=N)


def cmd_rigging_verify(cfg: RunConfig) -> dict:
    r = _load_rigging(cfg)
    out_dir = pathlib.Path(cfg.output_path)
    validation = validate_rigging(r)
    blocks = assemble_grunsky_blocks(r, cfg.K)
    identity = wf_identity_report(r, cfg.K, blocks)
    tests = [("constant", RationalFunction((), [1.0]))]
    tests += [(f"random_{cfg.seed + s}", random_rational(r, seed=cfg.seed + s))
              for s in range(GRAPH_TEST_FUNCTIONS)]
    graphs = {name: verify_graph(r, h, cfg.K, blocks) for name, h in tests}
    graph_residual = max(g.residual for g in graphs.values())
    roundtrip = apply_K(r, random_rational(r, seed=cfg.seed), None)
    report = {
        "validation": validation.to_raw(),
        "identity": identity,
        "graph": {name: g.to_raw() for name, g in graphs.items()},
        "graph_residual": graph_residual,
        "k_roundtrip_residual": roundtrip.residual,
        "hs_norm": hilbert_schmidt_norm(blocks),
        "hs_partial_sums": hs_partial_sums(blocks),
        "singular_values": singular_values(blocks),
    }
    raw = blocks.to_raw()
    raw["report"] = report
    write_json(raw, out_dir / "blocks.json")
    _write_curves(out_dir, r.curves)
    failures: list[str] = []
    _check(failures, "identity", identity["identity_residual"], cfg.tolerances.identity)
    _check(failures, "graph", graph_residual, cfg.tolerances.graph)
    _check(failures, "roundtrip", roundtrip.residual, cfg.tolerances.roundtrip)
    counts = {"slots": r.n + 1, "basis_vectors": identity["basis_vectors"], "test_functions": len(tests)}
    return _finish(cfg, out_dir, counts, failures)


def cmd_hs_norm(cfg: RunConfig) -> dict:
    loaded = _expect(load_input(cfg.input_path), (Rigging, LaurentMap), "hs-norm")
    out_dir = pathlib.Path(cfg.output_path)
    failures: list[str] = []
    if isinstance(loaded, Rigging):
        r = _load_rigging(cfg, loaded)
        validate_rigging(r)
        blocks = assemble_grunsky_blocks(r, cfg.K)
        result = {"kind": "rigging", "K": cfg.K, "hs_norm": hilbert_schmidt_norm(blocks),
                  "partial_sums": hs_partial_sums(blocks)}
        curves = r.curves
    else:
        N = _resolve_N(cfg)
        matrix = grunsky_via_generating(loaded, cfg.K)
        hs = grunsky_hs_norm(matrix)
        result = {"kind": "map", "K": cfg.K, "hs_norm": hs, "partial_sums": grunsky_hs_partial_sums(matrix)}
        _check(failures, "hs", abs(hs - grunsky_hs_norm(grunsky_via_faber(loaded, cfg.K))), cfg.tolerances.hs)
        curves = [sample_curve(loaded, N)]
    write_json(result, out_dir / "hs_norm.json")
    _write_curves(out_dir, curves)
    return _finish(cfg, out_dir, {"K": cfg.K, "curves": len(curves)}, failures)


def _curve_report(fmap, N: int) -> tuple[dict, CurveSample]:
    curve = sample_curve(fmap, N, check_simple=False)
    area = signed_area(curve.points)
    report = {
        "simple": is_simple(curve.points),
        "orientation": "positive" if area > 0 else "negative",
        "signed_area": area,
        "perimeter": curve.perimeter,
        "chord_arc": chord_arc_constant(curve),
    }
    return report, curve


def cmd_report(cfg: RunConfig) -> dict:
    loaded = load_input(cfg.input_path)
    out_dir = pathlib.Path(cfg.output_path)
    if isinstance(loaded, Rigging):
        r = _load_rigging(cfg, loaded)
        result = {"kind": "rigging", "validation": validate_rigging(r, raise_on_overlap=False).to_raw()}
        curves = r.curves
    elif isinstance(loaded, (TaylorMap, LaurentMap)):
        N = _resolve_N(cfg)
        diagnostics, curve = _curve_report(loaded, N)
        result = {"kind": "map", "map": loaded.to_raw(), "curve": diagnostics}
        if isinstance(loaded, LaurentMap):
            generating = grunsky_via_generating(loaded, cfg.K)
            composed = grunsky_via_faber(loaded, cfg.K)
            result["grunsky"] = {
                "symmetry_residual": generating.symmetry_residual(),
                "weighted_symmetry_residual": generating.weighted_symmetry_residual(),
                "agreement": float(np.max(np.abs(generating.entries - composed.entries))),
                "hs_norm": grunsky_hs_norm(generating),
            }
        curves = [curve]
    else:
        raise ConfigError("report needs a map or a rigging", kind="validation")
    write_json(result, out_dir / "report.json")
    _write_curves(out_dir, curves)
    return _finish(cfg, out_dir, {"curves": len(curves)}, [])


COMMAND_HANDLERS = {
    "faber": cmd_faber,
    "grunsky": cmd_grunsky,
    "jump": cmd_jump,
    "rigging-verify": cmd_rigging_verify,
    "hs-norm": cmd_hs_norm,
    "report": cmd_report,
}


def run(cfg: RunConfig) -> dict:
    handler = COMMAND_HANDLERS.get(cfg.command)
    if handler is None:
        raise ConfigError(f"Unsupported command: {cfg.command}")
    logger.info("running %s on %s", cfg.command, cfg.input_path)
    return handler(cfg)
