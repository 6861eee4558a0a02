"""
Monte Carlo harness for the frontier estimator.

Two data generating processes, both with covariates U(1, 2):

- dgp_i:  f(x) = -x^2 + 4x
- dgp_ii: f(x1, x2) = exp(-f1(x1) - f2(x2)),
          f1(x) = -1.5x^2 + 3x - 1, f2(x) = -(ln x + 1)/2 + ln 2

and Y = f(X) R with R ~ M(p). Each replica derives its own seed from
(base seed, cell, replica) so any replica can be rerun alone, and the
replicas of a cell are gathered in batches on a thread pool.
"""

import asyncio
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..config import settings
from ..models import Bandwidths, Dataset, DgpKind, DgpSpec, GeneratedData, ReplicaRecord, RunConfig, SimReport
from . import matsuoka
from .errors import DomainError, FrontierLabError, StudyFailedError
from .frontier import BandwidthPolicy, fit_frontier, fit_p_oracle
from .kernels import Kernel

logger = logging.getLogger(__name__)

MASK_64 = (1 << 64) - 1
INTERIOR = (1.05, 1.95)


# ---------------------------------------------------------------------------
# Data generating processes
# ---------------------------------------------------------------------------


def frontier_i(x):
    x = np.asarray(x, dtype=float)
    return -x * x + 4.0 * x


def component_1(x):
    x = np.asarray(x, dtype=float)
    return -1.5 * x * x + 3.0 * x - 1.0


def component_2(x):
    x = np.asarray(x, dtype=float)
    return -(np.log(x) + 1.0) / 2.0 + math.log(2.0)


def frontier_ii(x1, x2):
    return np.exp(-component_1(x1) - component_2(x2))


def _child_seeds(seed: int, count: int) -> list[int]:
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def generate(spec: DgpSpec) -> GeneratedData:
    """
    Draw a sample and keep the latent truth.

    Covariates and inefficiencies use independent child streams of ``spec.seed``.
    """
    x_seed, r_seed = _child_seeds(spec.seed, 2)
    X = np.random.default_rng(x_seed).uniform(1.0, 2.0, size=(spec.n, spec.m))
    R = matsuoka.sample(spec.p, spec.n, seed=r_seed)
    if spec.kind == "dgp_i":
        f = frontier_i(X[:, 0])
        components = []
    else:
        components = [component_1(X[:, 0]), component_2(X[:, 1])]
        f = np.exp(-components[0] - components[1])
    g0 = 1.5 / spec.p
    g = g0 - np.log(f)
    Y = f * R
    dataset = Dataset(Y=Y, X=X)
    return GeneratedData(
        spec=spec,
        dataset=dataset,
        frontier=f,
        regression=g,
        errors=dataset.Z - g,
        components=components,
    )


def ase(estimate, truth) -> float:
    """n^-1 sum (estimate_i - truth_i)^2."""
    estimate = np.asarray(estimate, dtype=float).reshape(-1)
    truth = np.asarray(truth, dtype=float).reshape(-1)
    if estimate.shape != truth.shape:
        raise DomainError(f"length mismatch: {estimate.shape[0]} estimates for {truth.shape[0]} truths")
    if estimate.size == 0:
        raise DomainError("ase needs at least one point")
    return math.fsum((estimate - truth) ** 2) / estimate.size


# ---------------------------------------------------------------------------
# Seeding
# ---------------------------------------------------------------------------


def splitmix64(x: int) -> int:
    """One SplitMix64 output step."""
    x = (x + 0x9E3779B97F4A7C15) & MASK_64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK_64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK_64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, cell: int, replica: int) -> int:
    """64-bit seed of replica ``replica`` in cell ``cell``."""
    state = splitmix64(base_seed & MASK_64)
    state = splitmix64(state ^ (cell & MASK_64))
    return splitmix64(state ^ (replica & MASK_64))


# ---------------------------------------------------------------------------
# Replicas
# ---------------------------------------------------------------------------


def run_replica(
    spec: DgpSpec,
    replica: int,
    method: Optional[str] = None,
    kernel: Union[Kernel, str] = "epanechnikov",
    bandwidth: BandwidthPolicy = "cv",
) -> ReplicaRecord:
    """generate -> fit_frontier -> score; failures land in ``error``."""
    try:
        sample = generate(spec)
        model = fit_frontier(sample.dataset, method=method, kernel=kernel, bandwidth=bandwidth)
        f_hat = model.frontier_at_observations()
        X = sample.dataset.X
        interior = np.all((X >= INTERIOR[0]) & (X <= INTERIOR[1]), axis=1)
        record = {
            "ase_g": ase(model.fitted, sample.regression),
            "ase_f": ase(f_hat, sample.frontier),
            "p_hat": model.p_hat,
            "p_tilde": fit_p_oracle(sample.errors),
            "max_abs_f": float(np.max(np.abs(f_hat - sample.frontier)[interior])) if interior.any() else None,
            "bandwidths": str(model.bandwidths),
        }
        if sample.components:
            fit_components = model.smoother_fit.components
            record["ase_g1"] = ase(fit_components[0], sample.components[0])
            record["ase_g2"] = ase(fit_components[1], sample.components[1])
        return ReplicaRecord(replica=replica, seed=spec.seed, **record)
    except (FrontierLabError, np.linalg.LinAlgError) as exc:
        logger.warning("replica %d (seed %d) failed: %s", replica, spec.seed, exc)
        return ReplicaRecord(replica=replica, seed=spec.seed, error=f"{type(exc).__name__}: {exc}")


class StudyRunner:
    """Runs the replicas of study cells in batches on a worker pool."""

    def __init__(self, threads: Optional[int] = None, batch_size: Optional[int] = None):
        """
        Args:
            threads: Worker cap (defaults to settings)
            batch_size: Replicas submitted per batch (defaults to settings)
        """
        self.threads = threads or settings.threads
        self.batch_size = batch_size or settings.batch_size
        if self.threads < 1 or self.batch_size < 1:
            raise DomainError("threads and batch_size must be >= 1")

    async def _run_batch(
        self,
        executor: ThreadPoolExecutor,
        specs: list[tuple[DgpSpec, int]],
        method: Optional[str],
        kernel: Union[Kernel, str],
        bandwidth: BandwidthPolicy,
    ) -> list[ReplicaRecord]:
        loop = asyncio.get_running_loop()
        tasks = [
            loop.run_in_executor(executor, run_replica, spec, r, method, kernel, bandwidth) for spec, r in specs
        ]
        return await asyncio.gather(*tasks)

    async def run_cell(
        self,
        cell: int,
        dgp: DgpKind,
        p: float,
        n: int,
        replicas: int,
        method: Optional[str] = None,
        kernel: Union[Kernel, str] = "epanechnikov",
        bandwidth: BandwidthPolicy = "cv",
        base_seed: int = 0,
        progress_callback: Optional[Callable[[str], None]] = None,
    ) -> SimReport:
        """
        Run one (p, n) cell.

        Raises:
            StudyFailedError: if more than ``settings.failure_rate_limit`` of the replicas fail
        """
        if replicas < 1:
            raise DomainError(f"replica count must be >= 1, got {replicas}")

        def log_progress(msg: str):
            logger.info(msg)
            if progress_callback:
                progress_callback(msg)

        method = method or ("loclin" if dgp == "dgp_i" else "cbs")
        specs = [
            (DgpSpec(kind=dgp, p=p, n=n, seed=derive_seed(base_seed, cell, r)), r) for r in range(replicas)
        ]
        log_progress(f"Cell {cell}: {dgp} p={p:g} n={n} method={method}, {replicas} replicas")

        started = time.perf_counter()
        records: list[ReplicaRecord] = []
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            for i in range(0, replicas, self.batch_size):
                batch = specs[i : i + self.batch_size]
                records.extend(await self._run_batch(executor, batch, method, kernel, bandwidth))
                log_progress(f"  {min(i + self.batch_size, replicas)}/{replicas} replicas done")

        policy = bandwidth if isinstance(bandwidth, str) else str(
            bandwidth if isinstance(bandwidth, Bandwidths) else Bandwidths(h=bandwidth)
        )
        report = SimReport.from_records(
            records,
            cell=cell,
            dgp=dgp,
            p=p,
            n=n,
            method=method,
            kernel=kernel if isinstance(kernel, str) else kernel.name,
            bandwidth_policy=policy,
            wall_clock=time.perf_counter() - started,
        )
        if report.failure_rate > settings.failure_rate_limit:
            first = next(r.error for r in report.replicas if not r.ok)
            raise StudyFailedError(
                f"{report.n_failed} of {report.n_replicas} replicas failed in cell {cell} (first: {first})"
            )
        log_progress(report.summary())
        return report

    async def run(
        self,
        dgp: DgpKind,
        ps: Sequence[float],
        ns: Sequence[int],
        replicas: int,
        method: Optional[str] = None,
        kernel: Union[Kernel, str] = "epanechnikov",
        bandwidth: BandwidthPolicy = "cv",
        base_seed: int = 0,
        progress_callback: Optional[Callable[[str], None]] = None,
    ) -> list[SimReport]:
        """Cells in p-major order, numbered from 0."""
        reports = []
        for cell, (p, n) in enumerate((p, n) for p in ps for n in ns):
            reports.append(
                await self.run_cell(
                    cell, dgp, p, n, replicas, method, kernel, bandwidth, base_seed, progress_callback
                )
            )
        return reports


def run_study(
    dgp: DgpKind,
    ps: Sequence[float],
    ns: Sequence[int],
    replicas: int,
    method: Optional[str] = None,
    kernel: Union[Kernel, str] = "epanechnikov",
    bandwidth: BandwidthPolicy = "cv",
    base_seed: int = 0,
    threads: Optional[int] = None,
    progress_callback: Optional[Callable[[str], None]] = None,
) -> list[SimReport]:
    """Synchronous entry point over the p x n grid; one SimReport per cell."""
    runner = StudyRunner(threads=threads)
    return asyncio.run(
        runner.run(dgp, ps, ns, replicas, method, kernel, bandwidth, base_seed, progress_callback)
    )


def consistency_echo(
    dgp: DgpKind,
    p: float,
    sizes: Iterable[int] = (100, 400, 1600),
    replicas: int = 50,
    method: Optional[str] = None,
    kernel: Union[Kernel, str] = "epanechnikov",
    bandwidth: BandwidthPolicy = "cv",
    base_seed: int = 0,
    threads: Optional[int] = None,
) -> pd.DataFrame:
    """
    Median |p-hat - p| and median max-abs f-hat error per sample size.

    Both columns should fall as n grows.
    """
    reports = run_study(dgp, [p], list(sizes), replicas, method, kernel, bandwidth, base_seed, threads)
    rows = []
    for report in reports:
        ok = [r for r in report.replicas if r.ok]
        rows.append(
            {
                "n": report.n,
                "median_abs_p_error": float(np.median([abs(r.p_hat - p) for r in ok])),
                "median_max_abs_f_error": float(
                    np.median([r.max_abs_f for r in ok if r.max_abs_f is not None])
                ),
            }
        )
    return pd.DataFrame(rows)


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def _write_csv(frame: pd.DataFrame, path: Union[str, Path], run_config: Optional[RunConfig]) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        if run_config is not None:
            fh.write("\n".join(run_config.header_lines()) + "\n")
        frame.to_csv(fh, index=False, float_format="%.17g", lineterminator="\n")
    return path


def replica_frame(report: SimReport) -> pd.DataFrame:
    """One row per replica: r, seed, ase_g, ase_f, [ase_g1, ase_g2,] p_hat, p_tilde."""
    columns = ["r", "seed", "ase_g", "ase_f"]
    if report.dgp == "dgp_ii":
        columns += ["ase_g1", "ase_g2"]
    columns += ["p_hat", "p_tilde", "max_abs_f", "bandwidths", "error"]
    rows = []
    for rec in report.replicas:
        row = rec.model_dump()
        row["r"] = row.pop("replica")
        rows.append({c: row[c] for c in columns})
    return pd.DataFrame(rows, columns=columns)


def write_replica_csv(report: SimReport, path: Union[str, Path], run_config: Optional[RunConfig] = None) -> Path:
    return _write_csv(replica_frame(report), path, run_config)


def write_aggregate_csv(
    reports: Sequence[SimReport], path: Union[str, Path], run_config: Optional[RunConfig] = None
) -> Path:
    """Table-shaped rows, one per cell."""
    return _write_csv(pd.DataFrame([r.aggregate_row() for r in reports]), path, run_config)


def write_plot_csv(
    reports: Sequence[SimReport], path: Union[str, Path], run_config: Optional[RunConfig] = None
) -> Path:
    """Long-format p-hat and ASE values for boxplots and histograms."""
    rows = [
        {
            "cell": report.cell,
            "p": report.p,
            "n": report.n,
            "method": report.method,
            "r": rec.replica,
            "p_hat": rec.p_hat,
            "p_tilde": rec.p_tilde,
            "ase_g": rec.ase_g,
            "ase_f": rec.ase_f,
        }
        for report in reports
        for rec in report.replicas
        if rec.ok
    ]
    return _write_csv(pd.DataFrame(rows), path, run_config)
