"""Argument parsing, logging setup and exit codes."""

import argparse
import logging
import sys
from typing import Optional, Sequence, TextIO

from pydantic import ValidationError

from .. import __version__
from ..config import settings
from ..core.errors import (
    BandwidthSelectionError,
    ConvergenceError,
    DomainError,
    FrontierLabError,
    StudyFailedError,
)
from ..models import RunConfig
from .commands import DIST_ACTIONS, cmd_dist, cmd_fit, cmd_simulate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

KERNELS = ("epanechnikov", "gaussian")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frontier-lab",
        description="Matsuoka-distribution production frontiers: distribution queries, fits and simulations.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=settings.log_level, help="Log level for stderr output")
    sub = parser.add_subparsers(dest="command", required=True)

    dist = sub.add_parser("dist", help="Query the Matsuoka distribution M(p)")
    dist.add_argument("action", choices=sorted(DIST_ACTIONS), help="What to compute")
    dist.add_argument("--p", type=float, help="Shape parameter p > 0")
    dist.add_argument("--x", type=float, nargs="+", help="Points in (0, 1)")
    dist.add_argument("--q", type=float, nargs="+", help="Probabilities (quantile) or stress parameter (reliability)")
    dist.add_argument("--k", type=float, help="Moment order; omit for the moment summary")
    dist.add_argument("--n", type=_positive_int, help="Sample size or order-statistic sample size")
    dist.add_argument("--r", type=_positive_int, help="Order-statistic rank")
    dist.add_argument("--seed", type=int, help="Seed for sample")
    dist.add_argument("--alpha", type=float, help="Expectile level or entropy order")
    dist.add_argument("--beta", type=float, help="Second Sharma-Mittal order")
    dist.add_argument(
        "--kind",
        default="shannon",
        choices=["shannon", "differential", "renyi", "tsallis", "sharma_mittal"],
        help="Entropy family",
    )
    dist.add_argument("--input", help="CSV of M(p) observations (fit)")
    dist.add_argument("--column", help="Column of --input to use (default: first)")

    fit = sub.add_parser("fit", help="Fit a production frontier to CSV data")
    fit.add_argument("--input", required=True, help="CSV with a header row")
    fit.add_argument("--output-col", required=True, help="Output column Y (> 0)")
    fit.add_argument("--input-cols", required=True, help="One or two comma-separated input columns")
    fit.add_argument("--method", choices=["loclin", "cbs", "sbs"], help="Default: loclin for one input, cbs for two")
    fit.add_argument("--kernel", choices=KERNELS, default="epanechnikov")
    fit.add_argument("--bandwidth", default="cv", help="'cv' or h1[,h2]")
    fit.add_argument("--model-out", help="Path of the JSON model")
    fit.add_argument("--scores-out", help="Path of the efficiency-score CSV")
    fit.add_argument("--grids-out", help="Path of the component-grid CSV (two inputs)")

    sim = sub.add_parser("simulate", help="Run a Monte Carlo study")
    sim.add_argument("--dgp", required=True, choices=["i", "ii"])
    sim.add_argument("--p", type=float, nargs="+", required=True, help="True p values")
    sim.add_argument("--n", type=int, nargs="+", required=True, help="Sample sizes (>= 10)")
    sim.add_argument("--replicas", type=_positive_int, required=True, help="Replicas N per cell")
    sim.add_argument("--seed", type=int, required=True, help="Base seed")
    sim.add_argument("--method", choices=["loclin", "cbs", "sbs"])
    sim.add_argument("--kernel", choices=KERNELS, default="epanechnikov")
    sim.add_argument("--bandwidth", default="cv", help="'cv' or fixed h1[,h2]")
    sim.add_argument("--threads", type=_positive_int, default=None, help="Worker cap (env FRONTIER_LAB_THREADS)")
    sim.add_argument("--out-dir", required=True, help="Existing directory for the CSV outputs")
    return parser


REQUIRED_DIST_FLAGS = {
    "pdf": ("p", "x"),
    "cdf": ("p", "x"),
    "quantile": ("p", "q"),
    "sample": ("p", "n"),
    "moment": ("p",),
    "expectile": ("p", "alpha"),
    "entropy": ("p",),
    "reliability": ("p", "q"),
    "fit": ("input",),
    "orderstat": ("p", "n", "r", "x"),
    "diagnostics": ("p",),
}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Validate cross-flag requirements and freeze the configuration."""
    options = {k: v for k, v in vars(args).items() if k not in ("command", "action", "log_level")}
    if args.command == "dist":
        missing = [f"--{flag}" for flag in REQUIRED_DIST_FLAGS[args.action] if getattr(args, flag) is None]
        if missing:
            raise DomainError(f"dist {args.action} requires {', '.join(missing)}")
        if args.action == "reliability":
            if len(args.q) != 1:
                raise DomainError("dist reliability takes a single --q")
            args.q = args.q[0]
        options = {k: v for k, v in options.items() if v is not None}
    if args.command == "simulate":
        args.threads = args.threads or settings.threads
        options["threads"] = args.threads
    return RunConfig(command=args.command, action=getattr(args, "action", None), options=options, version=__version__)


COMMANDS = {"dist": cmd_dist, "fit": cmd_fit, "simulate": cmd_simulate}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (ConvergenceError, BandwidthSelectionError, StudyFailedError)):
        return EXIT_NUMERICAL
    if isinstance(exc, (DomainError, ValidationError)):
        return EXIT_DOMAIN
    if isinstance(exc, OSError):
        return EXIT_IO
    if isinstance(exc, FrontierLabError):
        return EXIT_NUMERICAL
    return 1


def main(argv: Optional[Sequence[str]] = None, out: TextIO = sys.stdout) -> int:
    """
    Run the command line.

    Returns:
        0 success, 2 usage or domain error, 3 numerical failure, 4 I/O error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=args.log_level.upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        config = resolve_config(args)
        return COMMANDS[args.command](args, config, out=out)
    except (FrontierLabError, ValidationError, OSError) as exc:
        message = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"frontier-lab {args.command}: {message}", file=sys.stderr)
        return exit_code_for(exc)
