"""One-hot encoding, train/test splitting, and dataset assembly."""

from dataclasses import dataclass, field

import numpy as np

from .scaling import MinMaxScaler, fit_minmax
from .schema import KIND_CATEGORICAL
from .records import RecordError

# Prices are mapped into a sub-range of (0, 1): training losses divide by the
# target and the sigmoid-head baseline needs targets strictly inside (0, 1),
# so the exact endpoints 0 and 1 must never occur.
PRICE_RANGE = (0.1, 0.9)


@dataclass(frozen=True)
class Split:
    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int


def split(n, frac=0.75, seed=0):
    """Deterministic shuffled split; train size is round(frac * n)."""
    if n < 4:
        raise ValueError(f"need at least 4 rows to split, got {n}")
    if not 0.0 < frac < 1.0:
        raise ValueError(f"train fraction must lie in (0, 1), got {frac}")
    n_train = int(np.floor(frac * n + 0.5))
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    return Split(np.sort(perm[:n_train]), np.sort(perm[n_train:]), seed)


def encoded_columns(schema):
    """Column names of the encoded text block, in schema order."""
    cols = []
    for attr in schema.attributes:
        if attr.kind == KIND_CATEGORICAL:
            cols.extend(f"{attr.name}={lvl}" for lvl in attr.levels)
        else:
            cols.append(attr.name)
    return cols


def one_hot_encode(records, schema):
    """Encode records into the text feature matrix (unscaled).

    Each categorical attribute with k levels expands into k indicator
    columns with exactly one 1; numeric and macro attributes are copied.
    """
    cols = encoded_columns(schema)
    X = np.zeros((len(records), len(cols)))
    for i, rec in enumerate(records):
        j = 0
        for attr in schema.attributes:
            v = rec.values[attr.name]
            if attr.kind == KIND_CATEGORICAL:
                X[i, j + attr.levels.index(v)] = 1.0
                j += len(attr.levels)
            else:
                X[i, j] = float(v)
                j += 1
    return X


def one_hot_decode(row, schema):
    """Invert one_hot_encode for a single encoded row."""
    values = {}
    j = 0
    for attr in schema.attributes:
        if attr.kind == KIND_CATEGORICAL:
            block = row[j : j + len(attr.levels)]
            hot = np.flatnonzero(block == 1.0)
            if hot.size != 1 or not np.all(np.isin(block, (0.0, 1.0))):
                raise RecordError(f"invalid one-hot block for attribute {attr.name!r}")
            values[attr.name] = attr.levels[int(hot[0])]
            j += len(attr.levels)
        else:
            values[attr.name] = float(row[j])
            j += 1
    return values


@dataclass
class EncodedDataset:
    """Model-ready arrays plus the scalers needed to go back to price units."""

    X_text: np.ndarray
    y: np.ndarray                      # normalized prices
    prices: np.ndarray                 # raw prices
    schema: object
    columns: list
    split: Split
    price_scaler: MinMaxScaler
    text_scaler: MinMaxScaler | None = None
    scaled_column_idx: np.ndarray | None = None
    X_deep: np.ndarray | None = field(default=None, repr=False)
    X_img: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self):
        return len(self.y)

    def branch_inputs(self, indices):
        out = {"text": self.X_text[indices]}
        if self.X_deep is not None:
            out["deep"] = self.X_deep[indices]
        if self.X_img is not None:
            out["shallow"] = self.X_img[indices]
        return out

    def tabular(self, indices):
        """Text block concatenated with deep features, for the flat baselines."""
        if self.X_deep is None:
            return self.X_text[indices]
        return np.hstack([self.X_text[indices], self.X_deep[indices]])

    def prices_from_norm(self, y_norm):
        return self.price_scaler.inverse(np.asarray(y_norm))


def encode_dataset(records, schema, data_split, X_deep=None, X_img=None,
                   normalize_prices=True):
    """Assemble an EncodedDataset; all scalers are fitted on training rows.

    Numeric and macro columns of the text block are min-max scaled onto
    [0, 1]; one-hot indicator columns are left as-is.  Prices are scaled
    into PRICE_RANGE unless ``normalize_prices`` is false.
    """
    X = one_hot_encode(records, schema)
    cols = encoded_columns(schema)
    prices = np.array([r.price for r in records], dtype=np.float64)
    tr = data_split.train_indices

    onehot = np.zeros(len(cols), dtype=bool)
    j = 0
    for attr in schema.attributes:
        if attr.kind == KIND_CATEGORICAL:
            onehot[j : j + len(attr.levels)] = True
            j += len(attr.levels)
        else:
            j += 1
    scaled_idx = np.flatnonzero(~onehot)

    text_scaler = None
    if scaled_idx.size:
        text_scaler = fit_minmax(X[np.ix_(tr, scaled_idx)],
                                 [cols[k] for k in scaled_idx])
        X = X.copy()
        X[:, scaled_idx] = text_scaler.apply(X[:, scaled_idx])

    if normalize_prices:
        price_scaler = fit_minmax(prices[tr, None], ["price"],
                                  feature_range=PRICE_RANGE)
    else:
        # identity scaler: raw currency units pass through
        price_scaler = MinMaxScaler(np.zeros(1), np.ones(1), (0.0, 1.0))
    y = price_scaler.apply(prices[:, None])[:, 0]

    if X_deep is not None and len(X_deep) != len(records):
        raise ValueError("deep feature rows do not match record count")
    if X_img is not None and len(X_img) != len(records):
        raise ValueError("image rows do not match record count")

    return EncodedDataset(
        X_text=X, y=y, prices=prices, schema=schema, columns=cols,
        split=data_split, price_scaler=price_scaler, text_scaler=text_scaler,
        scaled_column_idx=scaled_idx, X_deep=X_deep, X_img=X_img,
    )
