#!/usr/bin/env python3
"""markov-decoherence command line: analyze stochastic matrices and their unital lifts."""

import argparse
import json
import logging
import os
import sys
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from typing import Any

from analysis.catalog import NAMED
from analysis.errors import MatrixAnalysisError
from config import DEFAULT_SETTINGS, AnalysisSettings
from reports.generator import render, write_report
from tools.analysis_tools import (
    report_passed,
    tool_analyze_matrix,
    tool_lift_phase_damping,
    tool_lift_pullover,
)

logger = logging.getLogger("markov_decoherence")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 4


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return value


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--tol",
        type=_positive_float,
        help=f"Projection and algebra tolerance (default {DEFAULT_SETTINGS.proj_tol:g})",
    )
    common.add_argument(
        "--zero-tol",
        type=_positive_float,
        help=f"Structural zero threshold (default {DEFAULT_SETTINGS.zero_tol:g})",
    )
    common.add_argument(
        "--epsilon",
        type=_positive_float,
        help=f"Decoherence time target (default {DEFAULT_SETTINGS.epsilon:g})",
    )
    common.add_argument(
        "--max-squarings",
        type=_positive_int,
        help=f"Squaring budget (default {DEFAULT_SETTINGS.max_squarings})",
    )
    common.add_argument(
        "--t-max",
        type=_positive_int,
        help=f"Step budget for the decoherence time (default {DEFAULT_SETTINGS.t_max})",
    )
    common.add_argument(
        "--format", choices=["json", "text"], default="text", help="Report format"
    )
    common.add_argument("--output", "-o", help="Write the report here instead of stdout")
    common.add_argument(
        "--input-format", choices=["csv", "json"], help="Matrix file format (default: by extension)"
    )
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")
    return common


def settings_from_args(args: argparse.Namespace) -> AnalysisSettings:
    """Settings with every flag the user passed applied; --tol sets both tolerances."""
    return DEFAULT_SETTINGS.with_overrides(
        proj_tol=args.tol,
        alg_tol=args.tol,
        zero_tol=args.zero_tol,
        epsilon=args.epsilon,
        max_squarings=args.max_squarings,
        t_max=args.t_max,
    )


def _print_error(e: Exception, source: str | None = None) -> None:
    message = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
    payload: dict[str, Any] = {"error": message, "type": type(e).__name__}
    if source is not None:
        payload["source"] = source
    print(json.dumps(payload), file=sys.stderr)


def _exit_code(e: Exception) -> int:
    return e.exit_code if isinstance(e, MatrixAnalysisError) else EXIT_USAGE


def _emit(reports: dict[str, Any] | list[dict[str, Any]], args: argparse.Namespace) -> None:
    content = render(reports, args.format)
    if args.output:
        write_report(content, args.output)
    else:
        sys.stdout.write(content)


def _run_one(
    produce: Callable[[], dict[str, Any]], args: argparse.Namespace, source: str | None = None
) -> int:
    try:
        report = produce()
    except (MatrixAnalysisError, ValueError, KeyError) as e:
        _print_error(e, source)
        return _exit_code(e)
    _emit(report, args)
    return EXIT_OK if report_passed(report) else EXIT_VERIFICATION


def _analyze_command(args: argparse.Namespace) -> int:
    settings = settings_from_args(args)
    if args.example is not None:
        if args.paths:
            raise argparse.ArgumentTypeError("give either matrix files or --example, not both")
        return _run_one(lambda: tool_analyze_matrix(example=args.example, settings=settings), args)
    if not args.paths:
        raise argparse.ArgumentTypeError("a matrix file or --example is required")
    if len(args.paths) == 1:
        path = args.paths[0]
        return _run_one(
            lambda: tool_analyze_matrix(path, input_format=args.input_format, settings=settings),
            args,
            path,
        )
    return _analyze_batch(args.paths, args, settings)


def _analyze_batch(paths: list[str], args: argparse.Namespace, settings: AnalysisSettings) -> int:
    """Analyze several files concurrently, reporting in input order."""

    def analyze(path: str) -> dict[str, Any] | Exception:
        try:
            return tool_analyze_matrix(path, input_format=args.input_format, settings=settings)
        except (MatrixAnalysisError, ValueError) as e:
            return e

    workers = min(len(paths), os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(analyze, paths))

    reports = []
    code = EXIT_OK
    for path, outcome in zip(paths, outcomes, strict=True):
        if isinstance(outcome, Exception):
            _print_error(outcome, path)
            code = max(code, _exit_code(outcome))
        else:
            reports.append(outcome)
            if not report_passed(outcome):
                code = max(code, EXIT_VERIFICATION)

    logger.info("batch of %d files: %d reports", len(paths), len(reports))
    if reports:
        _emit(reports, args)
    return code


def _pullover_command(args: argparse.Namespace) -> int:
    settings = settings_from_args(args)
    if (args.path is None) == (args.example is None):
        raise argparse.ArgumentTypeError("give exactly one of a matrix file or --example")
    return _run_one(
        lambda: tool_lift_pullover(
            args.path, example=args.example, input_format=args.input_format, settings=settings
        ),
        args,
        args.path,
    )


def _phase_damping_command(args: argparse.Namespace) -> int:
    settings = settings_from_args(args)
    return _run_one(lambda: tool_lift_phase_damping(args.alpha, args.beta, settings), args)


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(
        prog="markov-decoherence",
        description="Peripheral projection, persistent algebra and decoherence of Markov chains.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    analyze = subparsers.add_parser(
        "analyze", parents=[common], help="Analyze one or more stochastic matrices"
    )
    analyze.add_argument("paths", nargs="*", help="CSV or JSON matrix files")
    analyze.add_argument("--example", choices=sorted(NAMED), help="Use a built-in matrix")
    analyze.set_defaults(func=_analyze_command)

    lift = subparsers.add_parser("lift", help="Analyze a unital map built from a stochastic matrix")
    lift_kinds = lift.add_subparsers(dest="kind", required=True)

    pullover = lift_kinds.add_parser(
        "pullover", parents=[common], help="Stochastic matrix composed with the diagonal"
    )
    pullover.add_argument("path", nargs="?", help="CSV or JSON matrix file")
    pullover.add_argument("--example", choices=sorted(NAMED), help="Use a built-in matrix")
    pullover.set_defaults(func=_pullover_command)

    damping = lift_kinds.add_parser(
        "phase-damping", parents=[common], help="Two-angle map on 2x2 matrices"
    )
    damping.add_argument("--alpha", type=float, required=True, help="First angle (radians)")
    damping.add_argument("--beta", type=float, required=True, help="Second angle (radians)")
    damping.set_defaults(func=_phase_damping_command)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return int(args.func(args))
    except argparse.ArgumentTypeError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MatrixAnalysisError as e:
        _print_error(e)
        return e.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
