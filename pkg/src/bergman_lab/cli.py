"""Command-line front end: run experiments, write a CSV/JSON report.

Settings come from an optional flat JSON config file (keys matching
:class:`~bergman_lab.experiments.ExperimentConfig` fields) with command-line
flags taking precedence.  Exit status: 0 when every report row passes, 1 when
any row fails, 2 on malformed usage or configuration.
"""

from __future__ import annotations

import argparse
import json
import sys

from .exceptions import BergmanLabError, UsageError
from .experiments import (
    EXPERIMENT_NAMES,
    ExperimentConfig,
    run_selected,
    write_report,
)

__all__ = ["build_parser", "main"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bergman-lab",
        description="Run projection/decomposition experiments and emit a "
                    "machine-readable report.",
    )
    parser.add_argument("--config", metavar="PATH",
                        help="flat JSON config file; flags override its entries")
    parser.add_argument("--experiment", default="all",
                        choices=(*EXPERIMENT_NAMES, "all"),
                        help="which experiment to run (default: all)")
    parser.add_argument("--n", type=int, help="ambient dimension (2 or 3)")
    parser.add_argument("--k", metavar="K1,K2,...",
                        help="comma-separated decomposition orders")
    parser.add_argument("--out", metavar="PATH",
                        help="report destination (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"),
                        help="report format (default: csv)")
    parser.add_argument("--seed", type=int, help="RNG seed for sampled points")
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            mapping = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(mapping, dict):
        raise UsageError(f"config file {path!r} must hold a JSON object")
    return mapping


def _parse_k_list(text: str) -> tuple:
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise UsageError(
            f"--k expects comma-separated integers, got {text!r}") from None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        mapping = _load_config_file(args.config) if args.config else {}
        if args.n is not None:
            mapping["n"] = args.n
        if args.k is not None:
            mapping["k_list"] = _parse_k_list(args.k)
        if args.out is not None:
            mapping["output"] = args.out
        if args.format is not None:
            mapping["format"] = args.format
        if args.seed is not None:
            mapping["seed"] = args.seed
        config = ExperimentConfig.from_mapping(mapping)
        names = EXPERIMENT_NAMES if args.experiment == "all" else (args.experiment,)
        rows = run_selected(config, names)
        text = write_report(rows, config.output, config.format)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BergmanLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if config.output is None:
        sys.stdout.write(text)
    failed = [r for r in rows if not r.passed]
    print(f"{len(rows)} rows, {len(failed)} failed", file=sys.stderr)
    for r in failed:
        where = f" k={r.k}" if r.k is not None else ""
        print(f"  FAIL {r.experiment}{where} {r.quantity}: "
              f"measured {r.measured:.6g}, reference {r.reference}",
              file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
