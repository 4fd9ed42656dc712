"""Command line interface.

Usage:
    entropylab run experiments/sandwich.yaml --seed 7 --out results/sandwich
    entropylab list-suites
    entropylab list-checks
    entropylab accept --seed 42 --quick --suite concentration --suite epi

Exit status is 0 when every report is satisfied, 2 on configuration errors
and 1 otherwise.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from entropylab.core.config import get_settings
from entropylab.core.errors import ConfigError
from entropylab.experiment.engine import ExperimentEngine, RunResult
from entropylab.experiment.runners import default_registry
from entropylab.experiment.spec import ExperimentConfig
from entropylab.experiment.suites import list_suites, suite_configs
from entropylab.experiment.writers import write_results
from entropylab.observability.logger import configure_logging, get_logger

logger = get_logger(__name__)

EXIT_OK, EXIT_UNSATISFIED, EXIT_CONFIG = 0, 1, 2


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="override the configured seed")
    parser.add_argument("--out", type=Path, default=None, help="output directory (default: $ENTROPYLAB_OUTPUT_DIR)")
    parser.add_argument(
        "--svg",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="write one SVG per concentration profile",
    )
    parser.add_argument("--jobs", type=int, default=None, help="checks run concurrently")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--json-logs", action="store_true", help="render logs as JSON lines")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entropylab",
        description="Numerical checks of entropy inequalities for log-concave measures",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment configuration (YAML or JSON)")
    run.add_argument("config", type=Path)
    _add_run_options(run)

    sub.add_parser("list-suites", help="list the built-in acceptance suites")
    sub.add_parser("list-checks", help="list the registered checkers")

    accept = sub.add_parser("accept", help="run the acceptance battery")
    accept.add_argument("--suite", action="append", default=None, help="run only this suite (repeatable)")
    accept.add_argument("--quick", action="store_true", help="smaller grids and sample sizes")
    _add_run_options(accept)
    return parser


def _execute(configs: Sequence[ExperimentConfig], args: argparse.Namespace) -> List[RunResult]:
    results = []
    for config in configs:
        results.append(ExperimentEngine(config, jobs=args.jobs).run_sync())
    return results


def _output(args: argparse.Namespace, config: Optional[ExperimentConfig]) -> tuple[Path, bool]:
    cfg = get_settings()
    out = args.out
    if out is None and config is not None and config.output.dir:
        out = Path(config.output.dir)
    svg = args.svg
    if svg is None and config is not None and config.output.svg is not None:
        svg = config.output.svg
    return Path(out or cfg.output_dir), cfg.write_svg if svg is None else svg


def _finish(results: Sequence[RunResult], out: Path, svg: bool, config: Optional[ExperimentConfig]) -> int:
    reports = [r for result in results for r in result.reports]
    profiles = [p for result in results for p in result.profiles]
    try:
        write_results(
            reports,
            profiles,
            out,
            svg=svg,
            jsonl=config.output.jsonl if config else True,
            summary=config.output.csv if config else True,
        )
    except OSError as exc:
        logger.error("write_failed", out_dir=str(out), error=str(exc))
        print(f"error: cannot write results to {out}: {exc}", file=sys.stderr)
        return EXIT_UNSATISFIED

    unsatisfied = [r for r in reports if not r.satisfied]
    print(f"{len(reports)} reports, {len(unsatisfied)} unsatisfied -> {out}")
    for report in unsatisfied:
        reason = report.error or f"margin {report.margin:.6g} < -slack {report.slack:.6g}"
        print(f"  UNSATISFIED {report.name} {report.params.get('models', '')}: {reason}")
    return EXIT_OK if reports and not unsatisfied else EXIT_UNSATISFIED


def cmd_run(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_file(args.config)
    if args.seed is not None:
        config = config.model_copy(update={"seed": args.seed})
    out, svg = _output(args, config)
    return _finish(_execute([config], args), out, svg, config)


def cmd_list_suites(args: argparse.Namespace) -> int:
    for line in list_suites():
        print(line)
    return EXIT_OK


def cmd_list_checks(args: argparse.Namespace) -> int:
    for name, description in sorted(default_registry().describe().items()):
        print(f"{name}: {description}")
    return EXIT_OK


def cmd_accept(args: argparse.Namespace) -> int:
    seed = get_settings().seed if args.seed is None else args.seed
    configs = suite_configs(args.suite, seed, quick=args.quick)
    out, svg = _output(args, None)
    return _finish(_execute(configs, args), out, svg, None)


COMMANDS = {
    "run": cmd_run,
    "list-suites": cmd_list_suites,
    "list-checks": cmd_list_checks,
    "accept": cmd_accept,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = get_settings()
    configure_logging(
        log_level=getattr(args, "log_level", None) or cfg.log_level,
        json_logs=getattr(args, "json_logs", False) or cfg.json_logs,
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        logger.error("config_error", error=str(exc), location=exc.location)
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
