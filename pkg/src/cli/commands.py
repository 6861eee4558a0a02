"""Subcommand implementations."""

import logging
import secrets
import sys
from pathlib import Path
from typing import Callable, TextIO

import numpy as np

from .. import __version__
from ..core import matsuoka
from ..core.errors import DomainError
from ..core.frontier import efficiency_scores, fit_frontier
from ..core.kernels import get_kernel
from ..core.simlab import run_study, write_aggregate_csv, write_plot_csv, write_replica_csv
from ..models import RunConfig
from .io import (
    check_input_path,
    check_output_path,
    components_frame,
    read_dataset,
    read_unit_sample,
    scores_frame,
    write_frame,
    write_model,
)

logger = logging.getLogger(__name__)


def fmt(value) -> str:
    """Full double precision."""
    if value is None:
        return "nan"
    return f"{float(value):.17g}"


def _emit_values(values, out: TextIO) -> None:
    for v in np.atleast_1d(values):
        print(fmt(v), file=out)


def _emit_pairs(pairs: dict, out: TextIO) -> None:
    for key, value in pairs.items():
        print(f"{key} {fmt(value)}", file=out)


def parse_bandwidth(text: str):
    """'cv' or comma-separated positive numbers."""
    if text.strip().lower() == "cv":
        return "cv"
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise DomainError(f"--bandwidth must be 'cv' or h1[,h2], got {text!r}") from exc


# ---------------------------------------------------------------------------
# dist
# ---------------------------------------------------------------------------


def _dist_pdf(args, out):
    _emit_values(matsuoka.pdf(args.p, np.asarray(args.x)), out)


def _dist_cdf(args, out):
    _emit_values(matsuoka.cdf(args.p, np.asarray(args.x)), out)


def _dist_quantile(args, out):
    _emit_values(matsuoka.quantile(args.p, np.asarray(args.q)), out)


def _dist_sample(args, out):
    seed = args.seed
    if seed is None:
        seed = secrets.randbits(63)
        print(f"seed {seed}", file=sys.stderr)
    _emit_values(matsuoka.sample(args.p, args.n, seed=seed), out)


def _dist_moment(args, out):
    if args.k is not None:
        _emit_values(matsuoka.raw_moment(args.p, args.k), out)
        return
    _emit_pairs(
        {
            "mean": matsuoka.mean(args.p),
            "variance": matsuoka.variance(args.p),
            "skewness": matsuoka.skewness(args.p),
            "kurtosis": matsuoka.kurtosis(args.p),
            "mode": matsuoka.mode(args.p),
        },
        out,
    )


def _dist_expectile(args, out):
    _emit_values(matsuoka.expectile(args.p, args.alpha), out)


def _dist_entropy(args, out):
    _emit_values(matsuoka.entropy(args.p, kind=args.kind, alpha=args.alpha, beta=args.beta), out)


def _dist_reliability(args, out):
    _emit_values(matsuoka.reliability((args.p, args.q)), out)


def _dist_fit(args, out):
    x = read_unit_sample(check_input_path(args.input), args.column)
    fit = matsuoka.fit_mle(x)
    _emit_pairs({"n": fit.n, "p_mle": fit.p_mle, "p_umvue": fit.p_umvue}, out)


def _dist_orderstat(args, out):
    x = np.asarray(args.x)
    pdf = np.atleast_1d(matsuoka.order_stat_pdf(args.p, args.n, args.r, x))
    cdf = np.atleast_1d(matsuoka.order_stat_cdf(args.p, args.n, args.r, x))
    if x.size == 1:
        _emit_pairs({"pdf": pdf[0], "cdf": cdf[0]}, out)
        return
    for xi, fi, ci in zip(x, pdf, cdf):
        print(f"{fmt(xi)} {fmt(fi)} {fmt(ci)}", file=out)


def _dist_diagnostics(args, out):
    report = matsuoka.closed_form_diagnostics(args.p, alpha=args.alpha or 2.0, n=args.n or 50)
    print(report.summary(), file=out)


DIST_ACTIONS: dict[str, Callable] = {
    "pdf": _dist_pdf,
    "cdf": _dist_cdf,
    "quantile": _dist_quantile,
    "sample": _dist_sample,
    "moment": _dist_moment,
    "expectile": _dist_expectile,
    "entropy": _dist_entropy,
    "reliability": _dist_reliability,
    "fit": _dist_fit,
    "orderstat": _dist_orderstat,
    "diagnostics": _dist_diagnostics,
}


def cmd_dist(args, config: RunConfig, out: TextIO = sys.stdout) -> int:
    """Distribution queries printed one value (or 'name value') per line."""
    DIST_ACTIONS[args.action](args, out)
    return 0


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------


def _components_path(args) -> Path | None:
    if args.grids_out:
        return Path(args.grids_out)
    anchor = args.scores_out or args.model_out
    if anchor is None:
        return None
    anchor = Path(anchor)
    return anchor.with_name(f"{anchor.stem}_components.csv")


def cmd_fit(args, config: RunConfig, out: TextIO = sys.stdout) -> int:
    """Three-step fit of a user CSV; writes the model, scores and component grids."""
    source = check_input_path(args.input)
    model_out = check_output_path(args.model_out)
    scores_out = check_output_path(args.scores_out)
    input_cols = [c.strip() for c in args.input_cols.split(",") if c.strip()]
    data = read_dataset(source, args.output_col, input_cols)
    grids_out = check_output_path(_components_path(args)) if data.m == 2 else None

    model = fit_frontier(
        data,
        method=args.method,
        kernel=get_kernel(args.kernel),
        bandwidth=parse_bandwidth(args.bandwidth),
    )
    report = efficiency_scores(model)

    if model_out is not None:
        write_model(model, model_out, config)
    if scores_out is not None:
        write_frame(scores_frame(model, report.scores), scores_out, config)
    if grids_out is not None:
        write_frame(components_frame(model), grids_out, config)

    _emit_pairs({"p_hat": model.p_hat}, out)
    print(f"method {model.method}", file=out)
    print(f"bandwidths {','.join(fmt(h) for h in model.bandwidths.h)}", file=out)
    print(f"above_frontier {report.n_above_one}", file=out)
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def cmd_simulate(args, config: RunConfig, out: TextIO = sys.stdout) -> int:
    """Monte Carlo study; on failure every file written so far is removed."""
    out_dir = Path(args.out_dir)
    if not out_dir.is_dir():
        raise FileNotFoundError(f"output directory does not exist: {out_dir}")
    dgp = "dgp_i" if args.dgp == "i" else "dgp_ii"
    bandwidth = parse_bandwidth(args.bandwidth)

    reports = run_study(
        dgp,
        args.p,
        args.n,
        args.replicas,
        method=args.method,
        kernel=get_kernel(args.kernel),
        bandwidth=bandwidth,
        base_seed=args.seed,
        threads=args.threads,
    )

    targets = [
        (out_dir / f"replicas_cell{r.cell}_p{r.p:g}_n{r.n}.csv", lambda path, r=r: write_replica_csv(r, path, config))
        for r in reports
    ]
    targets.append((out_dir / "aggregate.csv", lambda path: write_aggregate_csv(reports, path, config)))
    targets.append((out_dir / "plot_data.csv", lambda path: write_plot_csv(reports, path, config)))

    written: list[Path] = []
    try:
        for path, write in targets:
            written.append(path)
            write(path)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise

    for report in reports:
        row = report.aggregate_row()
        print(" ".join(f"{k}={fmt(v) if isinstance(v, float) else v}" for k, v in row.items()), file=out)
    logger.info("simulate: wrote %d files to %s (version %s)", len(written), out_dir, __version__)
    return 0
