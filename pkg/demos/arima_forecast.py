"""ARIMA walkthrough: difference a trending series, fit, and forecast.

We simulate a random-walk-with-drift price index, fit an ARIMA(1,1,0)
on the training portion, and compare the held-out tail against the
multi-step forecast.
"""

import numpy as np

from housepred import arima


def main():
    rng = np.random.default_rng(3)
    index = 100.0 + np.cumsum(0.4 + rng.normal(scale=1.5, size=120))
    train, test = index[:100], index[100:106]

    report = arima.stationarity_report(train)
    print(f"trend slope {report['trend_slope']:+.3f}, "
          f"likely nonstationary: {report['likely_nonstationary']}")

    model = arima.fit_arima(train, 1, 1, 0)
    print(f"phi = {model.phi}, intercept = {model.intercept:.3f}")
    for w in model.warnings:
        print(f"warning: {w}")

    forecast = arima.forecast(model, train, len(test))
    print("\n  step   forecast     actual")
    for k, (fc, actual) in enumerate(zip(forecast, test), start=1):
        print(f"  {k:>4}   {fc:8.2f}   {actual:8.2f}")


if __name__ == "__main__":
    main()
