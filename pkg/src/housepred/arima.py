"""AR / MA / ARMA / ARIMA modeling with conditional estimation.

Sign convention: the differenced, mean-centered series z follows

    z(t) = phi_1 z(t-1) + ... + phi_p z(t-p)
           + a(t) - theta_1 a(t-1) - ... - theta_q a(t-q)

with shocks a(t) taken as 0 before the sample.  ARMA coefficients are
estimated by the Hannan-Rissanen two-stage regression (long-AR residual
proxies, then joint least squares), optionally refined by minimizing the
conditional sum of squares with finite-difference gradient descent.
"""

from dataclasses import dataclass, field

import numpy as np


class ArimaError(ValueError):
    pass


@dataclass
class ArimaModel:
    p: int
    d: int
    q: int
    phi: np.ndarray
    theta: np.ndarray
    mean: float                       # level of the differenced series
    sigma2: float
    residuals: np.ndarray = field(repr=False)
    intercept: float = 0.0            # residual level after centering
    warnings: list = field(default_factory=list)


def difference(series, d):
    x = np.asarray(series, dtype=np.float64)
    if x.size <= d:
        raise ArimaError(f"series of length {x.size} too short for d={d}")
    for _ in range(d):
        x = np.diff(x)
    return x


def undifference(head, diffs, d=None):
    """Integrate d-th order differences forward from the last d originals.

    ``head`` holds the d original-scale values immediately preceding the
    differenced values; returns the original-scale continuation, so that
    concatenating head with undifference(head, difference(x, d)[...]) on
    aligned slices reproduces x exactly.
    """
    head = np.asarray(head, dtype=np.float64)
    diffs = np.asarray(diffs, dtype=np.float64)
    if d is None:
        d = head.size
    if head.size != d:
        raise ArimaError(f"head length {head.size} != d={d}")
    if d == 0:
        return diffs.copy()
    # last value of each difference level of the head
    levels = [head]
    for _ in range(d - 1):
        levels.append(np.diff(levels[-1]))
    last = [lvl[-1] for lvl in levels]   # orders 0 .. d-1
    out = np.empty(diffs.size)
    for i, v in enumerate(diffs):
        acc = v
        for k in range(d - 1, -1, -1):
            acc = last[k] + acc
            last[k] = acc
        out[i] = acc
    return out


def acf(series, max_lag):
    """Sample autocorrelations for lags 0..max_lag (biased estimator)."""
    x = np.asarray(series, dtype=np.float64)
    n = x.size
    if n <= max_lag + 1:
        raise ArimaError(f"series of length {n} too short for max_lag={max_lag}")
    z = x - x.mean()
    denom = np.dot(z, z)
    if denom == 0:
        raise ArimaError("constant series has no autocorrelation")
    return np.array([np.dot(z[: n - k], z[k:]) / denom for k in range(max_lag + 1)])


def pacf(series, max_lag):
    """Partial autocorrelations via the Durbin-Levinson recursion."""
    r = acf(series, max_lag)
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    if max_lag == 0:
        return out
    phi_prev = np.array([r[1]])
    out[1] = r[1]
    for k in range(2, max_lag + 1):
        num = r[k] - np.dot(phi_prev, r[k - 1 : 0 : -1])
        den = 1.0 - np.dot(phi_prev, r[1:k])
        pk = num / den
        phi_new = np.empty(k)
        phi_new[: k - 1] = phi_prev - pk * phi_prev[::-1]
        phi_new[k - 1] = pk
        phi_prev = phi_new
        out[k] = pk
    return out


def _ar_design(z, p):
    rows = z.size - p
    cols = [z[p - i - 1 : p - i - 1 + rows] for i in range(p)]
    cols.append(np.ones(rows))    # intercept absorbs any residual level
    return np.column_stack(cols), z[p:]


def fit_ar(series, p):
    """Least-squares AR(p) on the mean-centered series."""
    x = np.asarray(series, dtype=np.float64)
    n = x.size
    if n < max(5 * p, p + 2):
        raise ArimaError(f"series of length {n} too short for AR({p})")
    mu = x.mean()
    z = x - mu
    if p == 0:
        return ArimaModel(0, 0, 0, np.empty(0), np.empty(0), float(mu),
                          float(np.mean(z**2)), z)
    X, y = _ar_design(z, p)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    res = y - X @ coef
    return ArimaModel(p, 0, 0, coef[:p], np.empty(0), float(mu),
                      float(np.mean(res**2)), res, intercept=float(coef[p]))


def _css_residuals(z, phi, theta, intercept=0.0):
    """Shock sequence under conditional estimation (pre-sample shocks 0)."""
    p, q = phi.size, theta.size
    n = z.size
    u = z - intercept
    for i in range(p):
        u[i + 1 :] -= phi[i] * z[: n - i - 1]
    if q == 0:
        return u
    a = np.zeros(n)
    for t in range(n):
        acc = u[t]
        for j in range(min(q, t)):
            acc += theta[j] * a[t - j - 1]
        a[t] = acc
    return a


def _css_objective(z, params, p, q):
    a = _css_residuals(z, params[:p], params[p : p + q], params[p + q])
    return float(np.dot(a, a))


def _css_refine(z, phi, theta, intercept, max_iter=200, tol=1e-8, fd_step=1e-6):
    """Gradient descent on the conditional sum of squares."""
    p, q = phi.size, theta.size
    params = np.concatenate([phi, theta, [intercept]])
    obj = _css_objective(z, params, p, q)
    step = 1e-4
    for _ in range(max_iter):
        grad = np.empty(params.size)
        for i in range(params.size):
            trial = params.copy()
            trial[i] += fd_step
            fp = _css_objective(z, trial, p, q)
            trial[i] = params[i] - fd_step
            fm = _css_objective(z, trial, p, q)
            grad[i] = (fp - fm) / (2 * fd_step)
        gnorm = np.linalg.norm(grad)
        if gnorm == 0:
            break
        improved = False
        while step > 1e-12:
            trial = params - step * grad / gnorm
            new_obj = _css_objective(z, trial, p, q)
            if new_obj < obj:
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        if obj - new_obj < tol * max(1.0, obj):
            params, obj = trial, new_obj
            break
        params, obj = trial, new_obj
        step *= 1.5
    return params[:p], params[p : p + q], params[p + q]


def _poly_warnings(phi, theta):
    out = []
    for name, coefs, label in (("AR", phi, "explosive/non-stationary"),
                               ("MA", theta, "non-invertible")):
        if coefs.size:
            roots = np.roots(np.concatenate([[-1.0], coefs])[::-1] * -1.0)
            if np.any(np.abs(roots) <= 1.0 + 1e-10):
                out.append(f"{label} {name} polynomial (root on/inside unit circle)")
    return out


def fit_arima(series, p, d, q, refine=True):
    """Difference d times, then estimate ARMA(p, q) on the result."""
    x = np.asarray(series, dtype=np.float64)
    if x.size - d < 5 * (p + q) + 10:
        raise ArimaError(
            f"series of length {x.size} too short for ARIMA({p},{d},{q})"
        )
    w = difference(x, d)
    if q == 0:
        base = fit_ar(w, p)
        model = ArimaModel(p, d, 0, base.phi, base.theta, base.mean,
                           base.sigma2, base.residuals)
        model.warnings = _poly_warnings(model.phi, model.theta)
        return model

    mu = w.mean()
    z = w - mu
    n = z.size
    # stage 1: long AR for shock proxies
    m = min(20, n // 10)
    m = max(m, p + q)
    X, y = _ar_design(z, m)
    phi_long, *_ = np.linalg.lstsq(X, y, rcond=None)
    e = np.zeros(n)
    e[m:] = y - X @ phi_long
    # stage 2: joint regression on lagged values and lagged shock proxies
    t0 = m + q
    rows = n - t0
    cols = []
    for i in range(1, p + 1):
        cols.append(z[t0 - i : n - i])
    for j in range(1, q + 1):
        cols.append(e[t0 - j : n - j])
    cols.append(np.ones(rows))
    D = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(D, z[t0:], rcond=None)
    phi = coef[:p]
    theta = -coef[p : p + q]   # regression gives -theta under our convention
    intercept = float(coef[p + q])
    if refine:
        phi, theta, intercept = _css_refine(z, phi, theta, intercept)
    res = _css_residuals(z, phi, theta, intercept)
    model = ArimaModel(p, d, q, phi, theta, float(mu),
                       float(np.mean(res**2)), res, intercept=float(intercept))
    model.warnings = _poly_warnings(phi, theta)
    return model


def forecast(model, history, h):
    """h-step recursive forecast in the original scale of ``history``."""
    x = np.asarray(history, dtype=np.float64)
    if x.size < max(model.p, model.q) + model.d:
        raise ArimaError("history too short for the model orders")
    w = difference(x, model.d) if model.d else x.copy()
    z = w - model.mean
    a = _css_residuals(z, model.phi, model.theta, model.intercept)
    z_ext = list(z)
    a_ext = list(a)
    zf = []
    for _ in range(h):
        t = len(z_ext)
        val = model.intercept
        for i in range(model.p):
            val += model.phi[i] * z_ext[t - i - 1]
        for j in range(model.q):
            if t - j - 1 < len(a_ext):
                val -= model.theta[j] * a_ext[t - j - 1]
        z_ext.append(val)
        a_ext.append(0.0)
        zf.append(val)
    wf = np.asarray(zf) + model.mean
    if model.d == 0:
        return wf
    return undifference(x[-model.d :], wf, model.d)


def stationarity_report(series, max_lag=20):
    """Heuristic stationarity aids: trend slope and ACF tail behavior."""
    x = np.asarray(series, dtype=np.float64)
    t = np.arange(x.size)
    slope = np.polyfit(t, x, 1)[0]
    r = acf(x, min(max_lag, x.size - 2))
    tail = r[max(1, len(r) // 2) :]
    return {
        "trend_slope": float(slope),
        "acf_tail_mean_abs": float(np.mean(np.abs(tail))),
        "likely_nonstationary": bool(np.mean(np.abs(tail)) > 0.5),
    }


def order_search(series, max_p=3, d=0, max_q=3):
    """AIC sweep over (p, d, q) as a convenience; returns the best orders."""
    best = None
    x = np.asarray(series, dtype=np.float64)
    n = x.size - d
    for p in range(max_p + 1):
        for q in range(max_q + 1):
            if n < 5 * (p + q) + 10:
                continue
            try:
                model = fit_arima(x, p, d, q)
            except (ArimaError, np.linalg.LinAlgError):
                continue
            aic = n * np.log(max(model.sigma2, 1e-300)) + 2 * (p + q + 1)
            if best is None or aic < best[0]:
                best = (aic, p, d, q)
    if best is None:
        raise ArimaError("no admissible order found")
    return {"aic": best[0], "p": best[1], "d": best[2], "q": best[3]}


def simulate_arma(n, phi=(), theta=(), sigma=1.0, seed=0, burn=200):
    """Simulate an ARMA path under the model's sign convention."""
    phi = np.asarray(phi, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    rng = np.random.default_rng(seed)
    total = n + burn
    a = rng.normal(0.0, sigma, size=total)
    z = np.zeros(total)
    for t in range(total):
        val = a[t]
        for i in range(phi.size):
            if t - i - 1 >= 0:
                val += phi[i] * z[t - i - 1]
        for j in range(theta.size):
            if t - j - 1 >= 0:
                val -= theta[j] * a[t - j - 1]
        z[t] = val
    return z[burn:]
