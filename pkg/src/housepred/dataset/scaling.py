"""Min-max scaling fitted on training rows only."""

from dataclasses import dataclass

import numpy as np


class ScalerError(ValueError):
    pass


@dataclass
class MinMaxScaler:
    """Maps each fitted column affinely from [min, max] onto a target range."""

    mins: np.ndarray
    maxs: np.ndarray
    feature_range: tuple = (0.0, 1.0)

    @property
    def spans(self):
        return self.maxs - self.mins

    def apply(self, X):
        X = np.asarray(X, dtype=np.float64)
        lo, hi = self.feature_range
        return lo + (X - self.mins) / self.spans * (hi - lo)

    def inverse(self, X):
        X = np.asarray(X, dtype=np.float64)
        lo, hi = self.feature_range
        return self.mins + (X - lo) / (hi - lo) * self.spans

    def to_dict(self):
        return {
            "mins": np.atleast_1d(self.mins).tolist(),
            "maxs": np.atleast_1d(self.maxs).tolist(),
            "feature_range": list(self.feature_range),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            np.asarray(d["mins"], dtype=np.float64),
            np.asarray(d["maxs"], dtype=np.float64),
            tuple(d["feature_range"]),
        )


def fit_minmax(X, columns=None, feature_range=(0.0, 1.0)):
    """Fit a per-column scaler; rejects constant columns by name.

    ``columns`` optionally names each column for error messages.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    mins = X.min(axis=0)
    maxs = X.max(axis=0)
    flat = np.flatnonzero(maxs <= mins)
    if flat.size:
        j = int(flat[0])
        name = columns[j] if columns is not None else f"column {j}"
        raise ScalerError(f"constant column {name!r}: max must exceed min")
    return MinMaxScaler(mins, maxs, feature_range)
