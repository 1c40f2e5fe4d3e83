"""Command-line entry point: ``orisqkd <experiment> --config FILE --out DIR``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .config import ScenarioConfig, parse_config, validate_config
from .errors import ConfigError, NonConvergence, OrderTooLarge
from .experiments import EXPERIMENTS, ValidationFailure, parse_grid, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_VALIDATION = 3

log = logging.getLogger("orisqkd")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="orisqkd",
        description="Channel, GML and key-rate experiments for ORIS-assisted HAP-to-drone QKD links.",
    )
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--config", help="scenario file (key = value lines); defaults apply if omitted")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="Monte-Carlo seed (overrides mc_seed)")
    p.add_argument("--samples", type=int, help="Monte-Carlo sample count (overrides mc_n)")
    p.add_argument("--grid-phi", help="incident zenith grid start:stop:step in degrees, stop inclusive")
    p.add_argument("--vacuum", action="store_true", help="switch turbulence off")
    p.add_argument("--profile", help="lps, fps or qps:<f_m>")
    p.add_argument("--pe", choices=["none", "weak", "moderate", "strong"], help="hovering preset")
    p.add_argument("--G", type=int, dest="G", help="Gauss-Laguerre order")
    p.add_argument("--workers", type=int, default=1, help="threads for sweep points and MC chunks")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _apply_overrides(cfg: ScenarioConfig, args: argparse.Namespace) -> ScenarioConfig:
    changes = {}
    if args.seed is not None:
        changes["mc_seed"] = args.seed
    if args.samples is not None:
        changes["mc_n"] = args.samples
    if args.vacuum:
        changes["vacuum_mode"] = True
    if args.profile is not None:
        changes["profile"] = args.profile.strip().lower()
    if args.pe is not None:
        changes["pe_preset"] = args.pe
    if args.G is not None:
        changes["G"] = args.G
    if not changes:
        return cfg
    return validate_config(dataclasses.replace(cfg, **changes), path="<command line>")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    logging.captureWarnings(True)

    try:
        cfg = parse_config(args.config) if args.config else validate_config(ScenarioConfig())
        cfg = _apply_overrides(cfg, args)
        grid = parse_grid(args.grid_phi) if args.grid_phi else None
    except (ConfigError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG

    try:
        paths = run_experiment(args.experiment, cfg, args.out, phi_grid=grid, workers=args.workers)
    except ValidationFailure as exc:
        log.error("validation failed: %s", exc)
        return EXIT_VALIDATION
    except (NonConvergence, OrderTooLarge, ArithmeticError) as exc:
        log.error("numeric failure: %s", exc)
        return EXIT_NUMERIC
    except (ConfigError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG

    for path in paths:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
