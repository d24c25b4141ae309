import numpy as np
import pytest

from housepred import pipeline
from housepred.dataset.synth import synth_generate
from housepred.fusion import MvtsConfig
from housepred.metrics import TABLE_COLUMNS


@pytest.fixture(scope="module")
def small_data():
    ds = synth_generate(60, seed=3, sigma_frac=0.02)
    return ds, pipeline.prepare_synthetic(ds, seed=3, grid_side=24)


class TestPrepare:
    def test_shapes(self, small_data):
        ds, data = small_data
        assert data.n == 60
        assert data.X_img.shape == (60, 3, 24, 24)
        assert data.X_deep.shape == (60, 1000)
        assert data.split.train_indices.size == 45

    def test_without_optional_blocks(self):
        ds = synth_generate(20, seed=4)
        data = pipeline.prepare_synthetic(ds, seed=4, with_images=False,
                                          with_deep=False)
        assert data.X_img is None
        assert data.X_deep is None

    def test_normalized_prices_in_range(self, small_data):
        _, data = small_data
        assert np.all((data.y > 0) & (data.y < 1))


class TestPeriodMeans:
    def test_matches_manual_chunking(self):
        prices = np.arange(100.0) + 50.0
        series = pipeline.period_mean_prices(prices, n_periods=4)
        assert series.shape == (4,)
        assert np.allclose(series, [np.mean(c) for c in np.array_split(prices, 4)])

    def test_uneven_chunks(self):
        series = pipeline.period_mean_prices(np.ones(10) * 7.0, n_periods=3)
        assert np.allclose(series, 7.0)

    def test_default_period_count(self):
        series = pipeline.period_mean_prices(np.arange(280.0))
        assert series.size == pipeline.N_PERIODS


class TestTimeSeriesScoring:
    def test_grey_forecast_shape(self, small_data):
        ds, data = small_data
        y_true, y_pred = pipeline.score_grey(data.prices, n_periods=12)
        assert y_true.shape == y_pred.shape == (3,)
        assert np.all(y_pred > 0)

    def test_arima_forecast_shape(self, small_data):
        ds, data = small_data
        y_true, y_pred = pipeline.score_arima(data.prices)
        assert y_true.shape == y_pred.shape == (7,)
        assert np.all(np.isfinite(y_pred))


class TestBenchmarkConfig:
    def test_defaults(self):
        cfg = pipeline.benchmark_config()
        assert cfg.seed == 1
        assert cfg.epochs == 15
        assert cfg.dtype == "float32"
        assert cfg.patience == 0

    def test_overrides(self):
        cfg = pipeline.benchmark_config(seed=7, epochs=2, image_side=24)
        assert cfg.seed == 7
        assert cfg.epochs == 2
        assert cfg.image_side == 24


class TestRunCompare:
    def test_nine_columns(self, small_data):
        ds, data = small_data
        cfg = pipeline.benchmark_config(seed=3, epochs=2, image_side=24)
        report = pipeline.run_compare(data, cfg, ts_orders=(1, 1, 0))
        assert report.columns == list(TABLE_COLUMNS)
        for col in report.columns:
            assert report.values[col]["MAPE (%)"] >= 0.0

    def test_loss_ablation_columns(self, small_data):
        ds, data = small_data
        cfg = pipeline.benchmark_config(seed=3, epochs=2, image_side=24)
        report = pipeline.run_loss_ablation(data, cfg)
        assert report.columns == ["lm", "la", "combined"]


class TestEpochsToTarget:
    def test_returns_epoch_count_within_cap(self, small_data):
        ds, data = small_data
        cfg = pipeline.benchmark_config(
            seed=3, epochs=4, image_side=24, branches=("text",))
        epochs, history = pipeline.epochs_to_target(data, cfg, target_mape=1e9)
        assert epochs == 1  # any epoch meets an absurdly easy target
        assert history.epochs == 4

    def test_unreachable_target_returns_cap(self, small_data):
        ds, data = small_data
        cfg = pipeline.benchmark_config(
            seed=3, epochs=3, image_side=24, branches=("text",))
        epochs, _ = pipeline.epochs_to_target(data, cfg, target_mape=0.0)
        assert epochs == 3
