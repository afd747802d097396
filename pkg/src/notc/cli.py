"""Command line entry point: ``notc run | aggregate | snapshot``."""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .harness import ConfigError, ExperimentConfig
from .population import write_snapshot

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2

_RUN_FLAGS = {
    "env": str,
    "runs": int,
    "trials": int,
    "window": int,
    "seed": int,
    "cells": int,
    "best": int,
    "novel": int,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _add_experiment_flags(p):
    for name, kind in _RUN_FLAGS.items():
        p.add_argument(f"--{name}", type=kind, default=None)
    p.add_argument("--config", type=Path, default=None, help="flat key=value file overriding defaults")


def build_parser():
    parser = _Parser(prog="notc", description="Novelty-Organizing Team of Classifiers experiments")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a seeded experiment and write records/curve CSVs")
    _add_experiment_flags(run)
    run.add_argument("--out", type=Path, required=True, help="output directory")
    run.add_argument("--debug", action="store_true", help="append a v_max column to records.csv")

    agg = sub.add_parser("aggregate", help="turn a records CSV into a curve CSV")
    agg.add_argument("--in", dest="infile", type=Path, required=True)
    agg.add_argument("--window", type=int, default=100)
    agg.add_argument("--out", type=Path, required=True)

    snap = sub.add_parser("snapshot", help="run one run and dump its final population")
    _add_experiment_flags(snap)
    snap.add_argument("--run-id", type=int, default=0)
    snap.add_argument("--out", type=Path, required=True, help="snapshot file")
    return parser


def resolve_config(args):
    """Defaults, then the config file, then explicit flags."""
    config = ExperimentConfig()
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError("config", str(exc)) from None
        config = harness.load_config(text, config)
    flags = {k: getattr(args, k) for k in _RUN_FLAGS if getattr(args, k) is not None}
    return replace(config, **flags).validate()


def _cmd_run(args):
    config = resolve_config(args)
    records = harness.run_experiment(config)
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "records.csv", "w", newline="\n") as fh:
        harness.write_records(records, fh, debug=args.debug)
    with open(args.out / "curve.csv", "w", newline="\n") as fh:
        harness.write_curve(harness.aggregate(records, config.window), fh)
    with open(args.out / "updates.csv", "w", newline="\n") as fh:
        harness.write_updates(harness.update_decay_report(records, config.window), fh)


def _cmd_aggregate(args):
    if args.window < 1:
        raise ConfigError("window", "must be a positive integer")
    with open(args.infile, newline="") as fh:
        records = harness.read_records(fh)
    with open(args.out, "w", newline="\n") as fh:
        harness.write_curve(harness.aggregate(records, args.window), fh)


def _cmd_snapshot(args):
    config = resolve_config(args)
    if not 0 <= args.run_id:
        raise ConfigError("run-id", "must be nonnegative")
    _, learner, _ = harness.run_single(config, args.run_id)
    with open(args.out, "w", newline="\n") as fh:
        write_snapshot(learner.population, learner.map, fh)


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {"run": _cmd_run, "aggregate": _cmd_aggregate, "snapshot": _cmd_snapshot}[args.command]
        handler(args)
    except _UsageError as exc:
        print(f"notc: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"notc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"notc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
