"""Evaluation metrics, correlation, factor contributions, and report tables."""

from dataclasses import dataclass, field

import numpy as np

# comparison-table column order: three single branches, the fusion model,
# then the five classic baselines
TABLE_COLUMNS = ("deep", "text", "shallow", "mvts", "svr", "bp", "gm", "ann", "arima")


def _check_pair(y, y_pred):
    y = np.asarray(y, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y.size == 0:
        raise ValueError("empty input")
    if y.shape != y_pred.shape:
        raise ValueError("length mismatch")
    return y, y_pred


def mae(y, y_pred):
    y, y_pred = _check_pair(y, y_pred)
    return float(np.mean(np.abs(y - y_pred)))


def mse(y, y_pred):
    y, y_pred = _check_pair(y, y_pred)
    return float(np.mean((y - y_pred) ** 2))


def mape(y, y_pred):
    """Mean absolute percentage error, in percent."""
    y, y_pred = _check_pair(y, y_pred)
    if np.any(y == 0):
        raise ValueError("MAPE undefined for zero targets")
    return float(100.0 * np.mean(np.abs((y_pred - y) / y)))


def pearson_r(x, y):
    """Sample Pearson correlation and its square."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 3 or y.size != x.size:
        raise ValueError("need aligned inputs of length >= 3")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt(np.dot(xc, xc) * np.dot(yc, yc))
    if denom == 0:
        raise ValueError("constant input has no correlation")
    r = float(np.clip(np.dot(xc, yc) / denom, -1.0, 1.0))
    return r, r * r


def factor_contribution(X):
    """Per-variable contribution rates from the correlation-matrix spectrum.

    Eigen-decomposes the correlation matrix and weights each variable's
    squared loadings by the component eigenvalues; rates are normalized
    to sum to 1.  All components are retained, no rotation.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 1:
        raise ValueError("need an n x m matrix with m >= 1")
    if np.any(X.std(axis=0) == 0):
        j = int(np.flatnonzero(X.std(axis=0) == 0)[0])
        raise ValueError(f"constant column {j} has no variance")
    if X.shape[1] == 1:
        return np.array([1.0])
    corr = np.corrcoef(X.T)
    vals, vecs = np.linalg.eigh(corr)
    vals = np.maximum(vals, 0.0)
    weighted = (vecs**2) @ (vals**2)
    return weighted / weighted.sum()


@dataclass
class MetricsReport:
    """MAPE/MSE/MAE per model, shaped like the model-comparison table."""

    columns: list
    values: dict                     # model -> metric -> value
    mse_unit: str = "currency^2"
    metadata: dict = field(default_factory=dict)

    METRICS = ("MAPE (%)", "MSE", "MAE")
    # the rendered comparison table shows the two headline rows
    TABLE_METRICS = ("MAPE (%)", "MSE")

    def row(self, metric):
        return [self.values[c][metric] for c in self.columns]

    def to_csv(self):
        lines = ["model," + ",".join(self.columns)]
        for m in self.TABLE_METRICS:
            lines.append(m.split(" ")[0] + "," + ",".join(
                f"{v:.6g}" for v in self.row(m)))
        return "\n".join(lines) + "\n"

    def to_markdown(self):
        lines = [
            "| metric | " + " | ".join(self.columns) + " |",
            "|" + "---|" * (len(self.columns) + 1),
        ]
        for m in self.TABLE_METRICS:
            lines.append(
                f"| {m} | " + " | ".join(f"{v:.4g}" for v in self.row(m)) + " |"
            )
        return "\n".join(lines) + "\n"


def report_table(predictions, columns=None, mse_unit="currency^2", metadata=None):
    """Assemble a MetricsReport from {model: (y_true, y_pred)} pairs."""
    columns = list(columns or predictions)
    missing = [c for c in columns if c not in predictions]
    if missing:
        raise ValueError(f"missing model predictions: {missing}")
    values = {}
    for name in columns:
        y, y_pred = predictions[name]
        values[name] = {
            "MAPE (%)": mape(y, y_pred),
            "MSE": mse(y, y_pred),
            "MAE": mae(y, y_pred),
        }
    return MetricsReport(columns, values, mse_unit, metadata or {})


def contribution_svg(names, rates, width=640, height=360):
    """Minimal SVG bar chart of factor contribution rates."""
    rates = np.asarray(rates, dtype=np.float64)
    n = rates.size
    margin = 50
    bar_w = (width - 2 * margin) / max(n, 1)
    top = max(rates.max(), 1e-9)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
    ]
    for i, (name, r) in enumerate(zip(names, rates)):
        h = (height - 2 * margin) * r / top
        x = margin + i * bar_w + 0.1 * bar_w
        y = height - margin - h
        parts.append(
            f'<rect x="{x:.1f}" y="{y:.1f}" width="{0.8 * bar_w:.1f}" '
            f'height="{h:.1f}" fill="steelblue"/>'
        )
        parts.append(
            f'<text x="{x + 0.4 * bar_w:.1f}" y="{height - margin + 16}" '
            f'font-size="11" text-anchor="middle">{name}</text>'
        )
        parts.append(
            f'<text x="{x + 0.4 * bar_w:.1f}" y="{y - 4:.1f}" '
            f'font-size="11" text-anchor="middle">{r:.3f}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
