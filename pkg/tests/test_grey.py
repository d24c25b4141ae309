import numpy as np
import pytest

from housepred.grey import (
    GreyModelError, ago, iago, fit_gm11, predict_gm11, check_gm11,
)


class TestAgoIago:
    def test_cumsum(self):
        assert ago([1, 2, 3]).tolist() == [1, 3, 6]

    def test_single_element(self):
        assert ago([5]).tolist() == [5]

    def test_iago_example(self):
        assert iago([1, 3, 6]).tolist() == [1, 2, 3]

    def test_constant_differences(self):
        assert iago([4, 4, 4]).tolist() == [4, 0, 0]

    def test_mutual_inverses_random(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            x = rng.normal(size=rng.integers(1, 30))
            assert np.allclose(iago(ago(x)), x, atol=1e-9)
            assert np.allclose(ago(iago(x)), x, atol=1e-9)

    def test_higher_order(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=12)
        assert np.allclose(iago(ago(x, r=3), r=3), x, atol=1e-8)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            ago([])


def geometric(c, q, n):
    return c * q ** np.arange(n)


class TestFitGm11:
    def test_exact_on_geometric(self):
        x = geometric(3.0, 1.2, 6)
        model = fit_gm11(x)
        rel = np.abs(model.fitted[1:] - x[1:]) / x[1:]
        assert np.max(rel) < 1e-8

    def test_constant_series(self):
        model = fit_gm11([7.0, 7.0, 7.0, 7.0])
        assert abs(model.a) < 1e-10
        assert abs(model.u - 7.0) < 1e-10
        assert np.allclose(predict_gm11(model, 3), 7.0, atol=1e-9)

    def test_zero_rejected(self):
        with pytest.raises(GreyModelError):
            fit_gm11([1.0, 0.0, 2.0, 3.0])

    def test_short_series_rejected(self):
        with pytest.raises(GreyModelError):
            fit_gm11([1.0, 2.0, 3.0])

    def test_matches_pinv_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            x = np.cumsum(rng.uniform(0.5, 2.0, size=8)) + 1.0
            model = fit_gm11(x)
            x1 = np.cumsum(x)
            z = 0.5 * (x1[:-1] + x1[1:])
            B = np.column_stack([-z, np.ones(len(x) - 1)])
            a_ref, u_ref = np.linalg.pinv(B) @ x[1:]
            assert abs(model.a - a_ref) < 1e-10
            assert abs(model.u - u_ref) < 1e-10


class TestPredictGm11:
    def test_continues_geometric(self):
        x = geometric(3.0, 1.2, 6)
        model = fit_gm11(x)
        fc = predict_gm11(model, 3)
        expected = geometric(3.0, 1.2, 9)[6:]
        assert np.max(np.abs(fc - expected) / expected) < 1e-6

    def test_zero_steps(self):
        model = fit_gm11(geometric(1.0, 1.1, 5))
        assert predict_gm11(model, 0).size == 0

    def test_forecast_consistency(self):
        model = fit_gm11(geometric(2.0, 1.15, 7))
        both = predict_gm11(model, 5)
        assert np.allclose(predict_gm11(model, 2), both[:2])


class TestCheckGm11:
    def test_geometric_passes(self):
        x = geometric(1.0, 1.1, 8)
        model = fit_gm11(x)
        report = check_gm11(model, x)
        assert report.verdict == "pass"
        assert report.mean_relative_error < 1e-8

    def test_alternating_warns(self):
        x = np.array([1.0, 10.0, 1.0, 10.0])
        model = fit_gm11(x)
        report = check_gm11(model, x)
        assert not report.ratios_ok
        assert report.verdict == "warn"
        assert model.warnings

    def test_constant_passes_zero_error(self):
        x = np.array([5.0, 5.0, 5.0, 5.0, 5.0])
        model = fit_gm11(x)
        report = check_gm11(model, x)
        assert report.verdict == "pass"
        assert report.mean_relative_error < 1e-12
