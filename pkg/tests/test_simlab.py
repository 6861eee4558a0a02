"""Tests for the Monte Carlo harness."""

import threading

import numpy as np
import pandas as pd
import pytest
from scipy import integrate

from src.core import simlab
from src.core.errors import DomainError, StudyFailedError, ZeroResidualError
from src.core.simlab import (
    ase,
    component_1,
    component_2,
    consistency_echo,
    derive_seed,
    frontier_i,
    frontier_ii,
    generate,
    replica_frame,
    run_replica,
    run_study,
    splitmix64,
    write_aggregate_csv,
    write_plot_csv,
    write_replica_csv,
)
from src.models import DgpSpec, RunConfig


class TestDgp:
    @pytest.mark.parametrize("p,variance", [(2.0, 0.375), (8.0, 3 / 128)])
    def test_error_variance(self, dgp_sample, p, variance):
        data = dgp_sample("dgp_i", p=p, n=200_000, seed=1)
        assert data.errors.mean() == pytest.approx(0.0, abs=0.01 * np.sqrt(variance))
        assert data.errors.var() == pytest.approx(variance, rel=0.03)

    def test_frontier_values(self):
        assert frontier_i(2.0) == 4.0
        assert frontier_ii(1.0, 1.0) == pytest.approx(0.5, rel=1e-15)

    @pytest.mark.parametrize("component", [component_1, component_2])
    def test_components_center_on_uniform(self, component):
        value, _ = integrate.quad(component, 1.0, 2.0)
        assert value == pytest.approx(0.0, abs=1e-13)

    def test_decomposition(self, dgp_sample):
        data = dgp_sample("dgp_ii", p=2.0, n=50, seed=3)
        np.testing.assert_allclose(data.regression, 0.75 + data.components[0] + data.components[1], atol=1e-13)
        np.testing.assert_allclose(data.errors, data.dataset.Z - data.regression)
        np.testing.assert_allclose(data.dataset.Y, data.frontier * np.exp(-(data.errors + 0.75)), rtol=1e-12)

    def test_covariates_in_unit_square(self, dgp_sample):
        X = dgp_sample("dgp_ii", n=500).dataset.X
        assert X.shape == (500, 2)
        assert np.all((X >= 1.0) & (X <= 2.0))

    def test_deterministic(self):
        spec = DgpSpec(kind="dgp_i", p=2.0, n=40, seed=99)
        np.testing.assert_array_equal(generate(spec).dataset.Y, generate(spec).dataset.Y)
        other = DgpSpec(kind="dgp_i", p=2.0, n=40, seed=100)
        assert not np.array_equal(generate(spec).dataset.Y, generate(other).dataset.Y)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            DgpSpec(kind="dgp_iii", p=2.0, n=40)
        with pytest.raises(ValueError):
            DgpSpec(kind="dgp_i", p=2.0, n=5)
        with pytest.raises(ValueError):
            DgpSpec(kind="dgp_i", p=2.0, n=40, seed=2**64)


class TestAse:
    def test_value(self):
        assert ase([1.0, 2.0], [1.0, 4.0]) == 2.0

    def test_zero(self):
        assert ase(np.arange(5.0), np.arange(5.0)) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            ase([1.0, 2.0], [1.0])

    def test_empty(self):
        with pytest.raises(DomainError):
            ase([], [])


class TestSeeds:
    def test_splitmix_reference(self):
        assert splitmix64(0) == 0xE220A8397B1DCDAF

    def test_derive_seed_deterministic(self):
        assert derive_seed(42, 1, 7) == derive_seed(42, 1, 7)
        assert 0 <= derive_seed(2**64 - 1, 3, 5) < 2**64

    def test_derive_seed_distinct(self):
        seeds = {derive_seed(42, cell, r) for cell in range(3) for r in range(500)}
        assert len(seeds) == 1500
        assert derive_seed(42, 0, 0) != derive_seed(43, 0, 0)


class TestReplicas:
    def test_single_replica_matches_hand_run(self):
        [report] = run_study("dgp_i", [2.0], [60], replicas=1, bandwidth=0.3, base_seed=7)
        spec = DgpSpec(kind="dgp_i", p=2.0, n=60, seed=derive_seed(7, 0, 0))
        record = run_replica(spec, 0, "loclin", "epanechnikov", 0.3)
        assert report.replicas[0] == record
        assert report.mean_p_hat == record.p_hat
        assert report.L_g == record.ase_g
        assert report.L_f == record.ase_f
        assert report.var_p_hat is None
        assert report.q05_p_hat == report.q95_p_hat == record.p_hat

    def test_record_contents(self):
        spec = DgpSpec(kind="dgp_ii", p=2.0, n=80, seed=11)
        record = run_replica(spec, 3, "cbs", "epanechnikov", (0.4, 0.4))
        assert record.ok and record.replica == 3 and record.seed == 11
        assert record.ase_g1 is not None and record.ase_g2 is not None
        assert record.p_tilde == pytest.approx(simlab.fit_p_oracle(generate(spec).errors))
        assert record.bandwidths == "0.4,0.4"

    def test_failures_are_recorded(self, monkeypatch):
        def broken(*args, **kwargs):
            raise ZeroResidualError("exact fit")

        monkeypatch.setattr(simlab, "fit_frontier", broken)
        record = run_replica(DgpSpec(kind="dgp_i", p=2.0, n=30, seed=1), 0, bandwidth=0.3)
        assert not record.ok
        assert record.error.startswith("ZeroResidualError")
        assert record.p_hat is None

    def test_study_fails_above_limit(self, monkeypatch):
        def broken(*args, **kwargs):
            raise ZeroResidualError("exact fit")

        monkeypatch.setattr(simlab, "fit_frontier", broken)
        with pytest.raises(StudyFailedError, match="3 of 3"):
            run_study("dgp_i", [2.0], [30], replicas=3, bandwidth=0.3)

    def test_tolerated_failures_are_reported(self, monkeypatch):
        real = simlab.fit_frontier
        lock = threading.Lock()
        calls = []

        def flaky(*args, **kwargs):
            with lock:
                calls.append(1)
                first = len(calls) == 1
            if first:
                raise ZeroResidualError("exact fit")
            return real(*args, **kwargs)

        monkeypatch.setattr(simlab, "fit_frontier", flaky)
        monkeypatch.setattr(simlab.settings, "failure_rate_limit", 0.5)
        [report] = run_study("dgp_i", [2.0], [30], replicas=4, bandwidth=0.3, threads=1)
        assert report.n_failed == 1
        assert report.failure_rate == 0.25
        assert report.p_hat_values().shape == (3,)
        frame = replica_frame(report)
        assert frame["error"].notna().sum() == 1

    def test_replica_count(self):
        with pytest.raises(DomainError):
            run_study("dgp_i", [2.0], [30], replicas=0, bandwidth=0.3)


class TestStudy:
    def test_thread_count_does_not_change_output(self, tmp_path):
        outputs = []
        for threads in (1, 3):
            reports = run_study("dgp_i", [2.0, 8.0], [40], replicas=6, bandwidth=0.3, base_seed=5, threads=threads)
            folder = tmp_path / f"t{threads}"
            folder.mkdir()
            paths = [write_replica_csv(r, folder / f"cell{r.cell}.csv") for r in reports]
            paths.append(write_aggregate_csv(reports, folder / "aggregate.csv"))
            paths.append(write_plot_csv(reports, folder / "plot.csv"))
            outputs.append([path.read_bytes() for path in paths])
        assert outputs[0] == outputs[1]

    def test_cells_are_p_major(self):
        reports = run_study("dgp_i", [1.0, 2.0], [30, 40], replicas=1, bandwidth=0.3)
        assert [(r.cell, r.p, r.n) for r in reports] == [(0, 1.0, 30), (1, 1.0, 40), (2, 2.0, 30), (3, 2.0, 40)]
        assert all(r.bandwidth_policy == "0.3" for r in reports)

    def test_aggregates_recompute(self):
        [report] = run_study("dgp_ii", [2.0], [50], replicas=4, bandwidth=(0.4, 0.4), base_seed=3)
        assert report.recompute_gap() <= 1e-12
        assert report.var_p_hat == pytest.approx(np.var(report.p_hat_values(), ddof=1))
        assert report.q05_p_hat == pytest.approx(np.quantile(report.p_hat_values(), 0.05))
        assert report.L_g1 is not None and report.L_g2 is not None

    def test_mase_falls_with_p(self):
        reports = run_study("dgp_i", [1.0, 2.0, 8.0], [100], replicas=20, bandwidth=0.3, base_seed=1)
        losses = [r.L_g for r in reports]
        assert losses[0] > losses[1] > losses[2]

    def test_progress_callback(self):
        messages = []
        run_study("dgp_i", [2.0], [30], replicas=2, bandwidth=0.3, progress_callback=messages.append)
        assert messages[0].startswith("Cell 0: dgp_i")
        assert any("2/2 replicas done" in m for m in messages)


class TestCsv:
    def test_replica_columns(self, tmp_path):
        [one] = run_study("dgp_i", [2.0], [30], replicas=2, bandwidth=0.3)
        [two] = run_study("dgp_ii", [2.0], [50], replicas=2, bandwidth=(0.4, 0.4))
        assert list(replica_frame(one).columns) == [
            "r", "seed", "ase_g", "ase_f", "p_hat", "p_tilde", "max_abs_f", "bandwidths", "error",
        ]
        assert list(replica_frame(two).columns)[4:6] == ["ase_g1", "ase_g2"]

    def test_provenance_header(self, tmp_path):
        [report] = run_study("dgp_i", [2.0], [30], replicas=2, bandwidth=0.3)
        config = RunConfig(command="simulate", options={"seed": 0, "p": [2.0]}, version="0.1.0")
        path = write_aggregate_csv([report], tmp_path / "aggregate.csv", run_config=config)
        lines = path.read_text().splitlines()
        assert lines[:4] == ["# frontier-lab 0.1.0", "# command: simulate", "# p: [2.0]", "# seed: 0"]
        frame = pd.read_csv(path, comment="#")
        assert frame.loc[0, "N"] == 2
        assert "wall_clock" not in frame.columns

    def test_full_precision(self, tmp_path):
        [report] = run_study("dgp_i", [2.0], [30], replicas=1, bandwidth=0.3)
        frame = pd.read_csv(write_replica_csv(report, tmp_path / "r.csv"), float_precision="round_trip")
        assert frame.loc[0, "p_hat"] == report.replicas[0].p_hat


@pytest.mark.slow
class TestAcceptance:
    def test_single_input_table(self):
        [report] = run_study("dgp_i", [2.0], [250], replicas=1000, base_seed=42, threads=4)
        assert 1.98 <= report.mean_p_hat <= 2.08
        assert 0.015 <= report.var_p_hat <= 0.045
        assert 1.70 <= report.q05_p_hat <= 1.86
        assert 2.22 <= report.q95_p_hat <= 2.38
        assert 0.05 <= report.L_f <= 0.10

    def test_upward_bias(self):
        reports = run_study("dgp_i", [1.0, 2.0, 8.0], [100, 250], replicas=500, base_seed=1, threads=4)
        for report in reports:
            assert report.mean_p_hat > report.p, report.summary()

    @pytest.mark.parametrize("method,lo,hi,loss", [("cbs", 1.00, 1.14, 0.17), ("sbs", 0.98, 1.12, 0.12)])
    def test_two_input_spot_check(self, method, lo, hi, loss):
        [report] = run_study("dgp_ii", [1.0], [100], replicas=200, method=method, base_seed=42, threads=4)
        assert lo <= report.mean_p_hat <= hi
        assert 0.5 * loss <= report.L_f <= 1.5 * loss

    def test_two_input_components(self):
        [report] = run_study("dgp_ii", [8.0], [250], replicas=50, method="sbs", base_seed=9, threads=4)
        assert report.L_g1 <= 0.01
        assert report.L_g2 <= 0.01

    @pytest.mark.parametrize("p", [2.0, 8.0])
    def test_consistency(self, p):
        table = consistency_echo("dgp_i", p, sizes=(100, 400, 1600), replicas=50, threads=4)
        assert table["median_abs_p_error"].is_monotonic_decreasing
        assert table["median_max_abs_f_error"].is_monotonic_decreasing
