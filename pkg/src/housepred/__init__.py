"""Multimodal house-price regression toolkit.

A three-branch fusion network (pretrained deep features, a shallow CNN
on raw views, encoded text attributes) with a combined relative-error +
mean-difference loss, alongside five classic baselines (GM(1,1), ARIMA,
SVR, BP, ANN), shared preprocessing and metrics, and a synthetic-data
harness with known ground truth.
"""

from . import arima, baselines, dataset, fusion, grey, metrics, nn, pipeline, svr

__all__ = [
    "arima", "baselines", "dataset", "fusion", "grey", "metrics", "nn",
    "pipeline", "svr",
]

__version__ = "0.1.0"
