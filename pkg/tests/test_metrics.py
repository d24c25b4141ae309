import numpy as np
import pytest

from housepred.metrics import (
    TABLE_COLUMNS, MetricsReport, contribution_svg, factor_contribution,
    mae, mape, mse, pearson_r, report_table,
)


class TestPointMetrics:
    def test_perfect_prediction(self):
        y = np.array([1.0, 2.0, 3.0])
        assert mae(y, y) == 0.0
        assert mse(y, y) == 0.0
        assert mape(y, y) == 0.0

    def test_single_point_values(self):
        assert mae([100.0], [110.0]) == 10.0
        assert mse([100.0], [110.0]) == 100.0
        assert mape([100.0], [110.0]) == pytest.approx(10.0)

    def test_mae_symmetric(self):
        rng = np.random.default_rng(0)
        y, p = rng.normal(size=20), rng.normal(size=20)
        assert mae(y, p) == mae(p, y)

    def test_mape_scale_invariance_exact(self):
        # powers of two rescale without rounding, so equality is bit-exact
        rng = np.random.default_rng(1)
        for _ in range(1000):
            y = rng.uniform(0.5, 10.0, size=8)
            p = rng.uniform(0.5, 10.0, size=8)
            k = float(2.0 ** rng.integers(-6, 7))
            assert mape(k * y, k * p) == mape(y, p)

    def test_mape_scale_invariance_general(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            y = rng.uniform(0.5, 10.0, size=8)
            p = rng.uniform(0.5, 10.0, size=8)
            k = rng.uniform(0.1, 100.0)
            assert mape(k * y, k * p) == pytest.approx(mape(y, p), rel=1e-12)

    def test_mse_square_homogeneity(self):
        rng = np.random.default_rng(2)
        y = rng.uniform(1, 5, size=10)
        p = rng.uniform(1, 5, size=10)
        for k in (0.5, 2.0, 10.0):
            assert mse(k * y, k * p) == pytest.approx(k**2 * mse(y, p), rel=1e-12)

    def test_mae_homogeneity(self):
        rng = np.random.default_rng(3)
        y = rng.uniform(1, 5, size=10)
        p = rng.uniform(1, 5, size=10)
        assert mae(3.0 * y, 3.0 * p) == pytest.approx(3.0 * mae(y, p), rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            mae([], [])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            mse([1.0, 2.0], [1.0])

    def test_mape_zero_target_rejected(self):
        with pytest.raises(ValueError):
            mape([0.0, 1.0], [1.0, 1.0])


class TestPearson:
    def test_exact_linear(self):
        x = np.linspace(0, 1, 10)
        r, r2 = pearson_r(x, 2 * x + 1)
        assert r == pytest.approx(1.0)
        assert r2 == pytest.approx(1.0)

    def test_exact_anticorrelation(self):
        x = np.linspace(0, 1, 10)
        r, _ = pearson_r(x, -x)
        assert r == pytest.approx(-1.0)

    def test_white_noise_band(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=5000)
        y = rng.normal(size=5000)
        r, _ = pearson_r(x, y)
        assert abs(r) < 0.05

    def test_affine_invariance(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=50)
        y = rng.normal(size=50)
        r0, _ = pearson_r(x, y)
        r1, _ = pearson_r(3.0 * x + 7.0, 0.5 * y - 2.0)
        assert abs(r0 - r1) < 1e-12

    def test_bounded(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            r, r2 = pearson_r(rng.normal(size=5), rng.normal(size=5))
            assert -1.0 <= r <= 1.0
            assert 0.0 <= r2 <= 1.0

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            pearson_r(np.ones(10), np.arange(10.0))

    def test_short_rejected(self):
        with pytest.raises(ValueError):
            pearson_r([1.0, 2.0], [3.0, 4.0])


class TestFactorContribution:
    def test_single_column(self):
        X = np.random.default_rng(7).normal(size=(30, 1))
        assert factor_contribution(X).tolist() == [1.0]

    def test_sum_to_one_and_nonnegative(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            X = rng.normal(size=(40, rng.integers(2, 7)))
            rates = factor_contribution(X)
            assert np.all(rates >= 0)
            assert abs(rates.sum() - 1.0) < 1e-10

    def test_identical_columns_symmetric(self):
        rng = np.random.default_rng(9)
        col = rng.normal(size=50)
        X = np.column_stack([col, col])
        rates = factor_contribution(X)
        assert np.allclose(rates, [0.5, 0.5], atol=1e-10)

    def test_independent_columns_near_uniform(self):
        rng = np.random.default_rng(10)
        X = rng.normal(size=(20000, 3))
        rates = factor_contribution(X)
        assert np.allclose(rates, 1 / 3, atol=0.05)

    def test_correlated_pair_outweighs_independent(self):
        rng = np.random.default_rng(11)
        a = rng.normal(size=2000)
        b = a + 0.1 * rng.normal(size=2000)
        c = rng.normal(size=2000)
        rates = factor_contribution(np.column_stack([a, b, c]))
        assert rates[0] > rates[2]
        assert rates[1] > rates[2]

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(12)
        X = rng.normal(size=(100, 4)) @ rng.normal(size=(4, 4))
        perm = [2, 0, 3, 1]
        base = factor_contribution(X)
        permuted = factor_contribution(X[:, perm])
        assert np.allclose(permuted, base[perm], atol=1e-10)

    def test_constant_column_rejected(self):
        X = np.column_stack([np.ones(20), np.arange(20.0)])
        with pytest.raises(ValueError):
            factor_contribution(X)


def two_model_predictions():
    y = np.array([100.0, 200.0, 300.0])
    return {
        "mvts": (y, y * 1.01),
        "svr": (y, y * 1.10),
    }


class TestReportTable:
    def test_full_column_set(self):
        rng = np.random.default_rng(13)
        y = rng.uniform(100, 500, size=25)
        preds = {name: (y, y + rng.normal(size=25)) for name in TABLE_COLUMNS}
        report = report_table(preds, columns=TABLE_COLUMNS)
        assert report.columns == list(TABLE_COLUMNS)
        assert len(report.columns) == 9
        # rendered table: header + 2 metric rows
        lines = report.to_csv().strip().split("\n")
        assert len(lines) == 3
        assert lines[0].count(",") == 9
        for metric in MetricsReport.METRICS:
            assert all(v >= 0 for v in report.row(metric))

    def test_values_match_direct_metrics(self):
        report = report_table(two_model_predictions())
        y = np.array([100.0, 200.0, 300.0])
        assert report.values["svr"]["MAPE (%)"] == pytest.approx(10.0)
        assert report.values["mvts"]["MAE"] == pytest.approx(mae(y, y * 1.01))

    def test_missing_model_rejected(self):
        with pytest.raises(ValueError):
            report_table(two_model_predictions(), columns=["mvts", "bp"])

    def test_markdown_shape(self):
        md = report_table(two_model_predictions()).to_markdown()
        lines = md.strip().split("\n")
        assert len(lines) == 4          # header, separator, MAPE, MSE
        assert lines[0].startswith("| metric |")
        assert lines[2].startswith("| MAPE")


class TestContributionSvg:
    def test_well_formed_svg(self):
        svg = contribution_svg(["a", "b", "c"], [0.5, 0.3, 0.2])
        assert svg.startswith("<svg")
        assert svg.rstrip().endswith("</svg>")
        assert svg.count("<rect") == 3
        for name in ("a", "b", "c"):
            assert f">{name}</text>" in svg
