"""GM(1,1) grey prediction.

Accumulate the raw series, regress each raw value on the negated mean of
consecutive accumulated values, solve the two-parameter normal equations,
then forecast with the whitening-equation solution and difference back
to the raw scale.
"""

from dataclasses import dataclass, field

import numpy as np

_A_ZERO = 1e-12  # below this |a|, use the degenerate linear solution


class GreyModelError(ValueError):
    pass


def ago(series, r=1):
    """r-fold accumulated generating operation (running cumulative sum)."""
    x = np.asarray(series, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty series")
    for _ in range(r):
        x = np.cumsum(x)
    return x


def iago(series, r=1):
    """Inverse of ago: first differences with the first element preserved."""
    x = np.asarray(series, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty series")
    for _ in range(r):
        x = np.concatenate([x[:1], np.diff(x)])
    return x


@dataclass
class GreyModel:
    a: float                 # development coefficient
    u: float                 # grey control quantity
    x0_first: float
    n: int
    residuals: np.ndarray = field(repr=False)       # fitted - actual, k = 2..n
    fitted: np.ndarray = field(repr=False)          # in-sample fit, k = 1..n
    warnings: list = field(default_factory=list)


def _level_ratio_band(n):
    return np.exp(-2.0 / (n + 1)), np.exp(2.0 / (n + 1))


def level_ratios(series):
    """sigma(k) = x0(k-1) / x0(k) for k = 2..n."""
    x = np.asarray(series, dtype=np.float64)
    return x[:-1] / x[1:]


def fit_gm11(series):
    """Identify (a, u) by least squares on the accumulated series."""
    x0 = np.asarray(series, dtype=np.float64)
    n = x0.size
    if n < 4:
        raise GreyModelError(f"need at least 4 data points, got {n}")
    if np.any(x0 <= 0):
        raise GreyModelError("all values must be strictly positive")

    warnings = []
    lo, hi = _level_ratio_band(n)
    ratios = level_ratios(x0)
    if np.any((ratios <= lo) | (ratios >= hi)):
        warnings.append(
            f"level ratios outside admissible band ({lo:.4f}, {hi:.4f}); "
            "fit may be unreliable"
        )

    x1 = ago(x0)
    z = 0.5 * (x1[:-1] + x1[1:])   # background values
    B = np.column_stack([-z, np.ones(n - 1)])
    y_n = x0[1:]
    gram = B.T @ B
    if abs(np.linalg.det(gram)) < 1e-300:
        raise GreyModelError("singular normal equations; data unsuitable for GM(1,1)")
    a, u = np.linalg.solve(gram, B.T @ y_n)

    fitted = _response(a, u, x0[0], n, 0)
    residuals = fitted[1:] - x0[1:]
    return GreyModel(float(a), float(u), float(x0[0]), n, residuals, fitted, warnings)


def _response(a, u, x0_first, n, steps):
    """Raw-scale model values for k = 1..n+steps.

    Solves the fitted difference equation x0(k) + a*z(k) = u exactly:
    the accumulated series is geometric with ratio (1 - a/2)/(1 + a/2)
    around the fixed point u/a (linear ramp when a = 0).  Unlike the
    continuous whitening solution e^{-ak}, this reproduces exactly
    exponential data to machine precision.
    """
    k = np.arange(n + steps)
    if abs(a) < _A_ZERO:
        x1 = x0_first + u * k
    else:
        if abs(1.0 + 0.5 * a) < _A_ZERO:
            raise GreyModelError(f"development coefficient a={a} too extreme")
        r = (1.0 - 0.5 * a) / (1.0 + 0.5 * a)
        x1 = (x0_first - u / a) * r**k + u / a
    return iago(x1)


def predict_gm11(model, steps):
    """Forecast ``steps`` values beyond the fitted sample, in raw scale."""
    if steps == 0:
        return np.empty(0)
    full = _response(model.a, model.u, model.x0_first, model.n, steps)
    return full[model.n :]


@dataclass
class GreyCheckReport:
    level_ratios: np.ndarray
    ratio_band: tuple
    ratios_ok: bool
    mean_relative_error: float
    verdict: str                # "pass" or "warn"


def check_gm11(model, series):
    """Level-ratio admissibility plus mean relative in-sample fitting error.

    Mean relative error below 10% passes; anything else is a warning.
    """
    x0 = np.asarray(series, dtype=np.float64)
    lo, hi = _level_ratio_band(x0.size)
    ratios = level_ratios(x0)
    ratios_ok = bool(np.all((ratios > lo) & (ratios < hi)))
    rel_err = float(np.mean(np.abs(model.residuals) / x0[1:]))
    verdict = "pass" if ratios_ok and rel_err < 0.10 else "warn"
    return GreyCheckReport(ratios, (lo, hi), ratios_ok, rel_err, verdict)
