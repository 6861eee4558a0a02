"""Tests for the three-step frontier estimator."""

import json
import logging
import math

import numpy as np
import pytest

from src.core import frontier as frontier_module
from src.core.errors import DomainError, OutOfDomainError, SchemaError, ZeroResidualError
from src.core.frontier import efficiency_scores, fit_frontier, fit_p_oracle, moment_estimate
from src.core.simlab import frontier_ii
from src.core.smoothers import classical_backfitting
from src.models import SCHEMA_VERSION, Bandwidths, Dataset, FrontierModel


@pytest.fixture
def dgp_i_model(dgp_sample):
    data = dgp_sample("dgp_i", p=2.0, n=250, seed=17)
    return data, fit_frontier(data.dataset, bandwidth=0.25)


@pytest.fixture
def dgp_ii_model(dgp_sample):
    data = dgp_sample("dgp_ii", p=2.0, n=120, seed=23)
    return data, fit_frontier(data.dataset, method="cbs", bandwidth=(0.4, 0.4))


class TestMomentEstimate:
    def test_unit_residuals(self):
        assert moment_estimate(np.ones(40)) == pytest.approx(math.sqrt(1.5), rel=1e-15)

    def test_oracle_small_sample(self):
        assert fit_p_oracle([1.0, 1.0, 2.0]) == pytest.approx(math.sqrt(0.75), rel=1e-15)

    def test_scale_homogeneity(self, rng):
        e = rng.standard_normal(50)
        assert moment_estimate(3.0 * e) == pytest.approx(moment_estimate(e) / 3.0, rel=1e-13)

    def test_zero_residuals(self):
        with pytest.raises(ZeroResidualError):
            fit_p_oracle(np.zeros(5))

    def test_consistent_on_true_errors(self, dgp_sample):
        data = dgp_sample("dgp_i", p=8.0, n=5000, seed=2)
        assert fit_p_oracle(data.errors) == pytest.approx(8.0, rel=0.05)


class TestFitFrontier:
    def test_constant_output_is_rejected(self, rng):
        data = Dataset(Y=np.full(20, 2.0), X=rng.uniform(1, 2, 20))
        with pytest.raises(ZeroResidualError):
            fit_frontier(data, bandwidth=0.5)

    def test_method_must_match_inputs(self, dgp_sample):
        one = dgp_sample("dgp_i", n=30).dataset
        two = dgp_sample("dgp_ii", n=30).dataset
        with pytest.raises(DomainError):
            fit_frontier(one, method="cbs", bandwidth=(0.5, 0.5))
        with pytest.raises(DomainError):
            fit_frontier(two, method="loclin", bandwidth=0.5)

    @pytest.mark.parametrize("bandwidth", ["silverman", -0.2, (0.3, 0.0)])
    def test_invalid_bandwidth(self, dgp_sample, bandwidth):
        with pytest.raises(DomainError):
            fit_frontier(dgp_sample("dgp_ii", n=30).dataset, bandwidth=bandwidth)

    def test_default_methods(self, dgp_i_model, dgp_ii_model):
        assert dgp_i_model[1].method == "loclin"
        assert dgp_ii_model[1].method == "cbs"

    def test_plug_in_identity(self, dgp_i_model):
        _, model = dgp_i_model
        expected = np.exp(1.5 / model.p_hat - model.fitted)
        np.testing.assert_array_equal(model.frontier_at_observations(), expected)
        assert model.g0 == 1.5 / model.p_hat

    def test_p_hat_is_moment_estimate(self, dgp_i_model):
        data, model = dgp_i_model
        np.testing.assert_array_equal(model.residuals, data.dataset.Z - model.fitted)
        assert model.p_hat == moment_estimate(model.residuals)

    def test_reasonable_estimate(self, dgp_sample):
        data = dgp_sample("dgp_i", p=2.0, n=500, seed=4)
        model = fit_frontier(data.dataset, bandwidth=0.25)
        assert 1.5 < model.p_hat < 2.6
        interior = np.linspace(1.1, 1.9, 9)
        np.testing.assert_allclose(model.evaluate(interior), -interior**2 + 4 * interior, rtol=0.15)

    def test_cv_policy_recorded(self, dgp_sample):
        data = dgp_sample("dgp_i", p=2.0, n=60, seed=8)
        model = fit_frontier(data.dataset)
        assert model.bandwidth_policy == "cv"
        assert model.bandwidths.m == 1

    def test_fixed_policy_recorded(self, dgp_i_model):
        assert dgp_i_model[1].bandwidth_policy == "fixed"
        assert dgp_i_model[1].bandwidths == Bandwidths(h=0.25)

    def test_cbs_residuals_have_mean_zero(self, dgp_ii_model):
        assert abs(dgp_ii_model[1].residuals.mean()) < 1e-12

    def test_sbs_pipeline(self, dgp_sample):
        data = dgp_sample("dgp_ii", p=2.0, n=120, seed=31)
        model = fit_frontier(data.dataset, method="sbs", bandwidth=(0.3, 0.3))
        assert model.method == "sbs"
        assert model.p_hat > 0
        value = model.evaluate([1.5, 1.5])
        assert value.shape == (1,)
        assert value[0] == pytest.approx(float(frontier_ii(1.5, 1.5)), rel=0.3)

    def test_explicit_backfitting_falls_back(self, dgp_sample, monkeypatch, caplog):
        monkeypatch.setattr(
            classical_backfitting,
            "backfitting_norms",
            lambda S1, S2: {"norm_spectral": 1.1, "norm_1": 1.2, "norm_inf": 1.2, "norm_fro": 1.5},
        )
        data = dgp_sample("dgp_ii", p=2.0, n=60, seed=5)
        with caplog.at_level(logging.WARNING, logger=frontier_module.__name__):
            model = fit_frontier(data.dataset, method="cbs", bandwidth=(0.4, 0.4), cbs_mode="explicit", grid_size=31)
        assert model.smoother_fit.iterations > 0
        assert all(grid.shape == (31,) for grid in model.grids)
        assert any("falling back" in r.getMessage() for r in caplog.records)

    def test_residual_diagnostics(self, dgp_i_model):
        model = dgp_i_model[1]
        diag = model.residual_diagnostics()
        assert diag["implied_variance"] == pytest.approx(np.mean(model.residuals**2), rel=1e-12)
        assert diag["residual_variance"] <= diag["implied_variance"]
        assert "p_hat" in dgp_i_model[1].summary()


class TestEfficiency:
    def test_scores_are_ratios(self, dgp_i_model):
        data, model = dgp_i_model
        report = efficiency_scores(model)
        np.testing.assert_array_equal(report.scores, data.dataset.Y / model.frontier_at_observations())
        assert report.n_above_one == int(np.sum(report.scores > 1.0))

    def test_mean_tracks_inefficiency_mean(self, dgp_sample):
        data = dgp_sample("dgp_i", p=2.0, n=500, seed=12)
        report = efficiency_scores(fit_frontier(data.dataset, bandwidth=0.25))
        assert abs(report.mean - (2 / 3) ** 1.5) < 3 * report.standard_error + 0.03

    def test_crossings_are_logged(self, dgp_i_model, caplog):
        _, model = dgp_i_model
        with caplog.at_level(logging.WARNING, logger=frontier_module.__name__):
            report = efficiency_scores(model)
        logged = any("above the estimated frontier" in r.getMessage() for r in caplog.records)
        assert logged == (report.n_above_one > 0)

    def test_needs_training_data(self, dgp_i_model):
        rebuilt = FrontierModel.from_document(dgp_i_model[1].to_document())
        with pytest.raises(DomainError):
            efficiency_scores(rebuilt)


class TestModelDocument:
    def test_round_trip(self, dgp_ii_model):
        _, model = dgp_ii_model
        doc = json.loads(json.dumps(model.to_document()))
        rebuilt = FrontierModel.from_document(doc)
        points = np.array([[1.2, 1.3], [1.5, 1.5], [1.8, 1.1]])
        np.testing.assert_array_equal(rebuilt.evaluate(points), model.evaluate(points))
        assert rebuilt.p_hat == model.p_hat
        assert rebuilt.fitted is None

    def test_document_fields(self, dgp_i_model):
        doc = dgp_i_model[1].to_document(run_config={"command": "fit"}, version="1.0.0")
        assert doc["schema_version"] == SCHEMA_VERSION
        assert doc["method"] == "loclin"
        assert doc["bandwidths"] == [0.25]
        assert len(doc["training_ranges"]) == 1
        assert doc["run_config"] == {"command": "fit"}
        assert doc["version"] == "1.0.0"

    def test_unknown_schema_version(self, dgp_i_model):
        doc = dgp_i_model[1].to_document()
        doc["schema_version"] = 99
        with pytest.raises(SchemaError):
            FrontierModel.from_document(doc)

    def test_malformed_document(self, dgp_i_model):
        doc = dgp_i_model[1].to_document()
        del doc["components"]
        with pytest.raises(SchemaError):
            FrontierModel.from_document(doc)

    def test_outside_training_range(self, dgp_i_model):
        _, model = dgp_i_model
        with pytest.raises(OutOfDomainError):
            model.evaluate([model.x_max[0] + 0.1])
        with pytest.raises(OutOfDomainError):
            model.evaluate(np.array([[1.5, 1.5]]))

    def test_endpoints_are_inside(self, dgp_i_model):
        _, model = dgp_i_model
        assert np.all(np.isfinite(model.evaluate([model.x_min[0], model.x_max[0]])))
