from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields, replace
from typing import Sequence

from .cauchy import NearSingularError
from .config_loader import COMMANDS, ConfigError, load_run_config_from_raw, read_document
from .faber import NotHolomorphicError
from .grunsky import IdentityViolatedError
from .models import RunConfig, Tolerances
from .rigging import BudgetError, OverlapError, UnderResolvedError
from .runner import ToleranceError, run
from .series import SeriesError
from .writer import dumps

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TOLERANCE = 3


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="grunskykit",
        description="Faber polynomials, Grunsky operators and Cauchy projections for conformal maps.",
    )
    parser.add_argument("--command", choices=COMMANDS, help="Command to run.")
    parser.add_argument("--input", help="Map, rigging or jump input (JSON or YAML).")
    parser.add_argument("--out", help="Output directory.")
    parser.add_argument("--order", "-K", type=int, dest="K", help="Truncation order K.")
    parser.add_argument("--samples", "-N", type=int, dest="N", help="Samples per curve (power of 2).")
    parser.add_argument("--tolerance", type=float, help="Override every residual tolerance.")
    parser.add_argument("--config", help="Run file supplying any of the fields above.")
    parser.add_argument("--seed", type=int, help="Seed for random test functions.")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging.")
    return parser.parse_args(argv)


def build_run_config(args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    if args.config:
        doc = read_document(args.config)
        if not isinstance(doc, dict):
            raise ConfigError("Run config must be a mapping/object")
        raw.update(doc)
    for key, value in (("command", args.command), ("input", args.input), ("output", args.out),
                       ("K", args.K), ("N", args.N), ("seed", args.seed)):
        if value is not None:
            raw[key] = value
    cfg = load_run_config_from_raw(raw)
    if args.tolerance is not None:
        override = {f.name: args.tolerance for f in fields(Tolerances)}
        cfg = replace(cfg, tolerances=Tolerances(**override))
    return cfg


def _error_kind(exc: Exception) -> str:
    if isinstance(exc, ConfigError):
        return exc.kind
    if isinstance(exc, BudgetError):
        return "budget"
    if isinstance(exc, OverlapError):
        return "overlap"
    if isinstance(exc, (UnderResolvedError, NearSingularError, NotHolomorphicError,
                        IdentityViolatedError, SeriesError)):
        return "numerics"
    return "validation"


def _emit(kind: str, message: str) -> None:
    sys.stdout.write(dumps({"error": kind, "message": message}))


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = build_run_config(args)
        result = run(cfg)
    except ToleranceError as exc:
        logger.error("tolerance failure: %s", exc)
        _emit("tolerance", str(exc))
        return EXIT_TOLERANCE
    except ValueError as exc:
        kind = _error_kind(exc)
        logger.error("%s error: %s", kind, exc)
        _emit(kind, str(exc))
        return EXIT_VALIDATION
    sys.stdout.write(dumps(result))
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
