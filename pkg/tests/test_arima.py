import numpy as np
import pytest

from housepred.arima import (
    ArimaError, difference, undifference, acf, pacf,
    fit_ar, fit_arima, forecast, simulate_arma, stationarity_report,
    order_search,
)


class TestDifference:
    def test_first_difference(self):
        assert difference([1, 2, 4], 1).tolist() == [1, 2]

    def test_zero_order_identity(self):
        assert difference([1.0, 2.0, 4.0], 0).tolist() == [1.0, 2.0, 4.0]

    def test_linear_ramp(self):
        assert difference([1, 2, 3, 4, 5], 1).tolist() == [1, 1, 1, 1]

    def test_too_short(self):
        with pytest.raises(ArimaError):
            difference([1.0], 1)


class TestUndifference:
    @pytest.mark.parametrize("d", [0, 1, 2, 3])
    def test_exact_roundtrip(self, d):
        rng = np.random.default_rng(d)
        x = rng.normal(size=30)
        diffs = difference(x, d)
        rebuilt = undifference(x[:d], diffs, d)
        assert np.allclose(np.concatenate([x[:d], rebuilt]), x, atol=1e-10)

    def test_cumsum_example(self):
        assert undifference([4.0], [1.0, 1.0]).tolist() == [5.0, 6.0]

    def test_head_length_mismatch(self):
        with pytest.raises(ArimaError):
            undifference([1.0, 2.0], [0.5], d=1)


class TestAcfPacf:
    def test_acf_zero_lag(self):
        x = np.random.default_rng(0).normal(size=50)
        assert acf(x, 5)[0] == 1.0

    def test_white_noise_band(self):
        x = np.random.default_rng(1).normal(size=5000)
        r = acf(x, 10)
        assert np.all(np.abs(r[1:]) < 3 / np.sqrt(5000))

    def test_ar1_theoretical_acf(self):
        z = simulate_arma(5000, phi=[0.8], seed=2)
        r = acf(z, 6)
        assert np.allclose(r[1:], 0.8 ** np.arange(1, 7), atol=0.05)

    def test_pacf_lag1_equals_acf1(self):
        x = np.random.default_rng(3).normal(size=400)
        assert abs(pacf(x, 5)[1] - acf(x, 5)[1]) < 1e-12

    def test_ar1_pacf_cuts_off(self):
        z = simulate_arma(5000, phi=[0.7], seed=4)
        p = pacf(z, 5)
        assert abs(p[1] - 0.7) < 0.05
        assert np.all(np.abs(p[2:]) < 0.05)

    def test_constant_series_rejected(self):
        with pytest.raises(ArimaError):
            acf(np.ones(50), 3)


class TestFitAr:
    def test_simulated_ar2_recovery(self):
        z = simulate_arma(2000, phi=[0.5, -0.3], seed=1)
        model = fit_ar(z, 2)
        assert abs(model.phi[0] - 0.5) < 0.05
        assert abs(model.phi[1] + 0.3) < 0.05

    def test_exact_noiseless_ar1(self):
        y = [0.5**k for k in range(30)]
        model = fit_ar(np.array(y), 1)
        assert abs(model.phi[0] - 0.5) < 1e-10

    def test_order_zero_mean_only(self):
        x = np.random.default_rng(5).normal(loc=3.0, size=50)
        model = fit_ar(x, 0)
        assert model.phi.size == 0
        assert abs(model.mean - x.mean()) < 1e-12
        assert np.allclose(model.residuals, x - x.mean())

    def test_too_short(self):
        with pytest.raises(ArimaError):
            fit_ar(np.arange(8.0), 2)


class TestFitArima:
    def test_q_zero_reduces_to_ar(self):
        z = simulate_arma(300, phi=[0.6], seed=6)
        a = fit_arima(z, 1, 0, 0)
        b = fit_ar(z, 1)
        assert np.array_equal(a.phi, b.phi)
        assert a.sigma2 == b.sigma2

    def test_arma11_recovery(self):
        z = simulate_arma(4000, phi=[0.6], theta=[0.4], seed=1)
        model = fit_arima(z, 1, 0, 1)
        assert abs(model.phi[0] - 0.6) < 0.08
        assert abs(model.theta[0] - 0.4) < 0.08

    def test_arima110_equivalent_to_ar_on_diffs(self):
        z = simulate_arma(2000, phi=[0.5], seed=7)
        y = np.cumsum(z) + 10.0
        raw = fit_arima(y, 1, 1, 0)
        pre = fit_ar(difference(y, 1), 1)
        assert abs(raw.phi[0] - pre.phi[0]) < 0.05

    def test_too_short(self):
        with pytest.raises(ArimaError):
            fit_arima(np.arange(20.0), 2, 0, 2)

    def test_explosive_warning(self):
        t = np.arange(120.0)
        y = 1.05**t
        model = fit_arima(y, 1, 0, 0)
        assert model.warnings


class TestForecast:
    def test_ar1_recursion(self):
        model = fit_ar(simulate_arma(200, phi=[0.5], seed=8), 1)
        model.phi[0] = 0.5
        model.mean = 0.0
        model.intercept = 0.0
        history = np.zeros(20)
        history[-1] = 4.0
        fc = forecast(model, history, 3)
        assert np.allclose(fc, [2.0, 1.0, 0.5], atol=1e-12)

    def test_pure_noise_forecasts_mean(self):
        x = np.random.default_rng(9).normal(loc=7.0, size=100)
        model = fit_ar(x, 0)
        assert np.allclose(forecast(model, x, 4), x.mean())

    def test_random_walk_flat(self):
        rng = np.random.default_rng(10)
        steps = rng.normal(size=199)
        steps -= steps.mean()          # exactly zero-mean increments
        y = np.concatenate([[5.0], 5.0 + np.cumsum(steps)])
        model = fit_arima(y, 0, 1, 0)
        fc = forecast(model, y, 3)
        assert np.allclose(fc, y[-1], atol=1e-9)

    def test_one_step_repeated_equals_multistep(self):
        z = simulate_arma(500, phi=[0.6], theta=[0.3], seed=11)
        model = fit_arima(z, 1, 0, 1)
        multi = forecast(model, z, 4)
        history = z.copy()
        singles = []
        for _ in range(4):
            f = forecast(model, history, 1)
            singles.append(f[0])
            history = np.append(history, f[0])
        assert np.allclose(singles, multi, atol=1e-9)

    def test_history_too_short(self):
        model = fit_ar(simulate_arma(100, phi=[0.5], seed=12), 1)
        model.d = 3
        with pytest.raises(ArimaError):
            forecast(model, np.arange(3.0), 2)


class TestDiagnostics:
    def test_stationarity_report_flags_trend(self):
        y = np.cumsum(np.random.default_rng(13).normal(size=300)) + \
            0.5 * np.arange(300)
        rep = stationarity_report(y)
        assert rep["likely_nonstationary"]

    def test_order_search_finds_ar(self):
        z = simulate_arma(800, phi=[0.7], seed=14)
        best = order_search(z, max_p=2, d=0, max_q=1)
        assert best["p"] >= 1
