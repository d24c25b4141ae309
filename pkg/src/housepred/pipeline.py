"""End-to-end orchestration: dataset assembly, model comparison, ablations.

The two time-series baselines are cross-sectional misfits, so they are
scored on a per-period mean-price series: the rows are chunked in order
into equal periods, the models fit the leading 75% of period means and
forecast the rest.
"""

import dataclasses

import numpy as np

from . import arima, baselines, fusion, grey, metrics, svr
from .dataset import encode_dataset, split, load_records, load_deep_features, load_images
from .dataset.schema import AttributeSchema
from .dataset.synth import SyntheticDataset

N_PERIODS = 28


def benchmark_config(seed=1, **overrides):
    """Training recipe used by the synthetic comparison benchmark.

    Small batches with a decaying step keep the sign-based loss from
    oscillating, and float32 roughly halves conv-stack wall time.
    """
    base = dict(epochs=15, lr=3e-3, lr_decay=0.85, batch_size=16,
                patience=0, dtype="float32", seed=seed)
    base.update(overrides)
    return fusion.MvtsConfig(**base)


def prepare_synthetic(ds, seed, grid_side=128, frac=0.75, normalize_prices=True,
                      with_images=True, with_deep=True):
    """EncodedDataset from an in-memory synthetic dataset."""
    sp = split(ds.n, frac, seed)
    X_deep = ds.deep_features() if with_deep else None
    X_img = ds.image_tensors(grid_side) if with_images else None
    return encode_dataset(ds.records, ds.schema, sp, X_deep, X_img,
                          normalize_prices=normalize_prices)


def prepare_dir(data_dir, seed, grid_side=128, frac=0.75, normalize_prices=True,
                with_images=True, with_deep=True):
    """EncodedDataset from an ingested dataset directory."""
    import os

    schema = AttributeSchema.load(os.path.join(data_dir, "schema.json"))
    records = load_records(os.path.join(data_dir, "records.csv"), schema)
    X_deep = None
    if with_deep:
        X_deep = load_deep_features(
            os.path.join(data_dir, "deep_features.csv"), records)
    X_img = None
    if with_images:
        X_img = np.stack([
            load_images(
                dataclasses.replace(
                    r, image_refs=tuple(os.path.join(data_dir, p) for p in r.image_refs)
                ),
                grid_side,
            )
            for r in records
        ])
    sp = split(len(records), frac, seed)
    return encode_dataset(records, schema, sp, X_deep, X_img,
                          normalize_prices=normalize_prices)


def period_mean_prices(prices, n_periods=N_PERIODS):
    """Chunk prices in row order into equal periods and average each."""
    prices = np.asarray(prices, dtype=np.float64)
    chunks = np.array_split(prices, n_periods)
    return np.array([c.mean() for c in chunks])


def score_grey(prices, frac=0.75, n_periods=N_PERIODS):
    series = period_mean_prices(prices, n_periods)
    n_train = int(np.floor(frac * series.size + 0.5))
    model = grey.fit_gm11(series[:n_train])
    fc = grey.predict_gm11(model, series.size - n_train)
    return series[n_train:], fc


def score_arima(prices, frac=0.75, n_periods=N_PERIODS, orders=(1, 1, 0)):
    series = period_mean_prices(prices, n_periods)
    n_train = int(np.floor(frac * series.size + 0.5))
    p, d, q = orders
    model = arima.fit_arima(series[:n_train], p, d, q)
    fc = arima.forecast(model, series[:n_train], series.size - n_train)
    return series[n_train:], fc


def run_compare(dataset, config, svr_eps=0.05, svr_C=10.0,
                bp_config=None, ann_config=None, ts_orders=(1, 1, 0)):
    """Train all nine comparison columns on the shared split."""
    preds = {}
    for name, branches in (("deep", ("deep",)), ("text", ("text",)),
                           ("shallow", ("shallow",)),
                           ("mvts", ("deep", "shallow", "text"))):
        cfg = dataclasses.replace(config, branches=branches)
        _, _, y_true, y_pred = fusion.train_and_eval(dataset, cfg)
        preds[name] = (y_true, y_pred)

    tr, te = dataset.split.train_indices, dataset.split.test_indices
    X_tr, X_te = dataset.tabular(tr), dataset.tabular(te)
    y_tr = dataset.y[tr]

    svr_model = svr.fit_svr(X_tr, y_tr, eps=svr_eps, C=svr_C, seed=config.seed)
    svr_pred = dataset.prices_from_norm(svr.predict_svr(svr_model, X_te))
    preds["svr"] = (dataset.prices[te], svr_pred)

    bp_config = bp_config or baselines.BpConfig(seed=config.seed)
    bp_net = baselines.fit_bp(X_tr, y_tr, bp_config)
    preds["bp"] = (dataset.prices[te],
                   baselines.predict_baseline(bp_net, X_te, dataset.price_scaler))

    ann_config = ann_config or baselines.AnnConfig(seed=config.seed)
    ann_net = baselines.fit_ann(X_tr, y_tr, ann_config)
    preds["ann"] = (dataset.prices[te],
                    baselines.predict_baseline(ann_net, X_te, dataset.price_scaler))

    preds["gm"] = score_grey(dataset.prices)
    preds["arima"] = score_arima(dataset.prices, orders=ts_orders)

    return metrics.report_table(
        preds, columns=list(metrics.TABLE_COLUMNS),
        metadata={"seed": config.seed, "n": dataset.n},
    )


def run_loss_ablation(dataset, config, branches=("text",)):
    """Loss-mode ablation: pure relative loss, pure mean loss, combined."""
    preds = {}
    for mode in ("lm", "la", "combined"):
        cfg = dataclasses.replace(config, branches=tuple(branches), loss_mode=mode)
        _, _, y_true, y_pred = fusion.train_and_eval(dataset, cfg)
        preds[mode] = (y_true, y_pred)
    return metrics.report_table(preds, columns=["lm", "la", "combined"])


def epochs_to_target(dataset, config, target_mape, max_epochs=None):
    """Epochs until validation MAPE first drops to the target, else the cap."""
    cfg = dataclasses.replace(config, epochs=max_epochs or config.epochs,
                              patience=0)
    _, history, _, _ = fusion.train_and_eval(dataset, cfg)
    for i, v in enumerate(history.val_mape, start=1):
        if v <= target_mape:
            return i, history
    return cfg.epochs, history
