"""``eekit`` command line.

    eekit <experiment> [--config PATH] [--out DIR] [--seed U64] [--samples N]
                       [--set key=value ...] [--threads K]
    eekit describe <experiment>
    eekit list

Exit status: 0 on success, 2 for configuration errors, 3 for runtime errors.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .config import (
    ConfigError,
    SystemConfig,
    apply_overrides,
    parse_config_text,
    parse_overrides,
    validate_config,
)
from .experiments import EXPERIMENTS, describe, run_experiment

log = logging.getLogger("eekit")

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_config(name, config_path=None, overrides=(), seed=None, samples=None) -> SystemConfig:
    """Defaults, then experiment defaults, then the config file, then ``--set``, ``--seed``, ``--samples``."""
    cfg = apply_overrides(SystemConfig(), EXPERIMENTS[name].defaults)
    if config_path is not None:
        try:
            text = open(config_path).read()
        except OSError as e:
            raise ConfigError([("config", f"cannot read {config_path}: {e.strerror}")]) from None
        cfg = apply_overrides(cfg, parse_config_text(text))
    cfg = apply_overrides(cfg, parse_overrides(overrides))
    if seed is not None:
        cfg = cfg.replace(seed=seed)
    if samples is not None:
        cfg = cfg.replace(samples=samples)
    return validate_config(cfg)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eekit", description="Regenerate EE figure/table data as CSV.")
    p.add_argument("experiment", help=f"one of {', '.join(EXPERIMENTS)}, or 'describe'/'list'")
    p.add_argument("target", nargs="?", help="experiment name for 'describe'")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--out", default="out", help="output directory (default: ./out)")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    if args.experiment == "list":
        for name, e in EXPERIMENTS.items():
            print(f"{name:8s} {e.figure}")
        return 0
    if args.experiment == "describe":
        try:
            print(describe(args.target or ""))
        except KeyError as e:
            print(f"eekit: {e.args[0]}", file=sys.stderr)
            return EXIT_CONFIG
        return 0
    if args.experiment not in EXPERIMENTS:
        print(f"eekit: unknown experiment {args.experiment!r}; choose from {', '.join(EXPERIMENTS)}", file=sys.stderr)
        return EXIT_CONFIG
    if args.threads < 1:
        print("eekit: --threads must be ≥ 1", file=sys.stderr)
        return EXIT_CONFIG

    try:
        cfg = build_config(args.experiment, args.config, args.overrides, args.seed, args.samples)
    except ConfigError as e:
        for field, reason in e.violations:
            print(f"eekit: config error: {field}: {reason}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        paths = run_experiment(args.experiment, cfg, args.out, threads=args.threads)
    except Exception as e:  # noqa: BLE001 - every failure maps to one exit code
        log.debug("run failed", exc_info=True)
        print(f"eekit: {args.experiment} failed: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    for p in paths:
        log.info("wrote %s", p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
