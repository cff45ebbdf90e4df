"""Command-line entry point: couette-lab <subcommand> [options].

Exit codes: 0 success, 1 other couette-lab error, 2 invalid configuration,
3 diverged run, 4 budget violation under --strict.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from couette_lab.core.config import RunConfig, RunMode, apply_overrides, get_config
from couette_lab.core.exceptions import ConfigError, CouetteLabError
from couette_lab.modules.energy import fit_decay_rate
from couette_lab.services.persistence import read_csv
from couette_lab.services.records import RunRecord
from couette_lab.services.runner import run
from couette_lab.settings import settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_BUDGET = 4


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="TOML run configuration")
    parser.add_argument("--output-dir", help="Directory for artifacts and record.json")
    parser.add_argument("--seed", type=int, help="Override the run seed")
    parser.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    parser.add_argument("--strict", action="store_true", help="Exit 4 when a budget check fails")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="Override a config value (TOML literal); repeatable",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="couette-lab", description="Near-Couette channel simulations and energy-budget verification"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("simulate", "Run the configured mode"),
        ("operator-audit", "Audit J_k and H_k norms, self-adjointness and coercivity"),
        ("energy-audit", "Run with per-k energy output and report the budget verdicts"),
    ):
        _add_common(sub.add_parser(name, help=help_text))

    for name, help_text in (
        ("sweep-nu", "Decay rate against viscosity with a log-log slope"),
        ("sweep-epsilon", "Classify perturbation sizes epsilon = c sqrt(nu)"),
    ):
        sweep = sub.add_parser(name, help=help_text)
        _add_common(sweep)
        sweep.add_argument("--values", help="Comma-separated sweep values (defaults to sweep.values)")
        sweep.add_argument("--workers", type=int, help="Concurrent child runs")

    fit = sub.add_parser("fit-rates", help="Fit exponential decay rates from a norms.csv")
    fit.add_argument("norms", type=Path, help="norms.csv written by a run (or a run directory)")
    fit.add_argument("--window", type=float, help="Fraction of final samples used (default 2/3)")
    fit.add_argument("--quiet", action="store_true")

    schema = sub.add_parser("show-config-schema", help="Print the run-configuration JSON schema")
    schema.add_argument("--quiet", action="store_true")
    return parser


def configure_logging(quiet: bool = False) -> None:
    level = logging.WARNING if quiet else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s", force=True)


def load_config(args: argparse.Namespace, extra: Optional[dict] = None) -> RunConfig:
    """Config file (else COUETTE_CONFIG_PATH or the defaults) plus --set overrides and the flags.

    Raises:
        ConfigError: For any invalid field
    """
    updates = dict(extra or {})
    if args.output_dir:
        updates["output_dir"] = str(args.output_dir)
    if args.seed is not None:
        updates["seed"] = args.seed

    if args.config:
        config = RunConfig.from_toml(args.config, args.overrides)
    elif args.overrides:
        config = RunConfig.from_dict(apply_overrides(get_config().model_dump(mode="json"), args.overrides))
    else:
        config = get_config()
    if updates:
        config = config.with_updates(**updates)
    return config


def _parse_values(raw: str) -> List[float]:
    try:
        return [float(item) for item in raw.split(",") if item.strip()]
    except ValueError as exc:
        raise ConfigError([f"--values: {exc}"]) from exc


def _report(record: RunRecord) -> None:
    summary = {
        "mode": record.mode,
        "status": record.status,
        "output_dir": record.output_dir,
        "rates": record.rates,
        "budget_passed": record.budget_passed,
        "summary": record.summary,
    }
    if record.sweep:
        summary["sweep"] = {key: value for key, value in record.sweep.items() if key != "records"}
    print(json.dumps(summary, indent=2, sort_keys=True, default=str))


def _exit_code(record: RunRecord, strict: bool) -> int:
    if record.status == "diverged":
        return EXIT_DIVERGED
    if strict and record.budget_passed is False:
        return EXIT_BUDGET
    return EXIT_OK


def _fit_rates(args: argparse.Namespace) -> int:
    path = args.norms / "norms.csv" if args.norms.is_dir() else args.norms
    try:
        table = read_csv(path)
    except (OSError, ValueError) as exc:
        raise CouetteLabError(f"cannot read {path}: {exc}") from exc
    results = {}
    for k in sorted(set(table["k"].astype(int).tolist())):
        mask = table["k"] == k
        rate, r2 = fit_decay_rate(table["t"][mask], table["norm"][mask], args.window)
        results[f"k={k}"] = {"rate": rate, "r2": r2}
    print(json.dumps(results, indent=2, sort_keys=True))
    return EXIT_OK


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "show-config-schema":
        print(json.dumps(RunConfig.model_json_schema(), indent=2))
        return EXIT_OK
    if args.command == "fit-rates":
        return _fit_rates(args)

    extra = {}
    if args.command == "operator-audit":
        extra["mode"] = RunMode.OPERATOR_AUDIT.value
    elif args.command == "energy-audit":
        extra["budget__per_k_csv"] = True
    elif args.command in ("sweep-nu", "sweep-epsilon"):
        extra["mode"] = RunMode.SWEEP.value
        extra["sweep__parameter"] = "nu" if args.command == "sweep-nu" else "epsilon"
        if args.values:
            extra["sweep__values"] = _parse_values(args.values)
        if args.workers:
            extra["sweep__workers"] = args.workers

    config = load_config(args, extra)
    if args.command == "energy-audit" and config.mode in (RunMode.OPERATOR_AUDIT, RunMode.SWEEP):
        raise ConfigError([f"mode: energy-audit needs a simulation mode, got {config.mode.value}"])

    record = run(config)
    _report(record)
    return _exit_code(record, args.strict or config.budget.strict)


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run, and map errors to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(getattr(args, "quiet", False))
    try:
        return dispatch(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except CouetteLabError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
