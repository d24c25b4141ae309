"""Model comparison walkthrough: all nine columns on one synthetic set.

Trains the four fusion variants, the SVR / BP / ANN tabular baselines,
and scores the GM(1,1) and ARIMA models on per-period mean prices,
then prints the comparison table.
"""

from housepred import pipeline
from housepred.dataset.synth import synth_generate


def main():
    ds = synth_generate(150, seed=2, sigma_frac=0.05)
    data = pipeline.prepare_synthetic(ds, seed=2, grid_side=32)
    cfg = pipeline.benchmark_config(seed=2, epochs=5, image_side=32)

    report = pipeline.run_compare(data, cfg)
    print(report.to_csv())
    best = min(report.columns, key=lambda c: report.values[c]["MAPE (%)"])
    print(f"lowest MAPE: {best} "
          f"({report.values[best]['MAPE (%)']:.2f}%)")


if __name__ == "__main__":
    main()
