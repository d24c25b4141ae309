"""Grey GM(1,1) walkthrough: fit a short price series and forecast it.

The grey model needs only a handful of points. We build a small
quarterly mean-price series with mild exponential growth, fit the
model, inspect the development coefficient, and forecast three steps.
"""

import numpy as np

from housepred import grey


def main():
    rng = np.random.default_rng(7)
    # four years of quarterly mean prices, ~2% growth per quarter
    prices = 180.0 * 1.02 ** np.arange(16) * (1 + 0.01 * rng.normal(size=16))

    model = grey.fit_gm11(prices[:12])
    print(f"development coefficient a = {model.a:+.4f}")
    print(f"grey control quantity  u = {model.u:.2f}")
    print(f"max in-sample residual   = {np.max(np.abs(model.residuals)):.3f}")

    forecast = grey.predict_gm11(model, 4)
    print("\n  step   forecast     actual")
    for k, (fc, actual) in enumerate(zip(forecast, prices[12:]), start=1):
        print(f"  {k:>4}   {fc:8.2f}   {actual:8.2f}")


if __name__ == "__main__":
    main()
