"""Linear support vector regression with an epsilon-insensitive tube.

Minimizes 0.5*||w||^2 + C * sum_i max(0, |w.x_i + b - y_i| - eps) in the
primal by averaged stochastic subgradient descent with a 1/(lambda*t)
step schedule (lambda = 1/(C*n)).  For low-dimensional problems the best
averaged iterate is polished by a derivative-free simplex search, which
handles the hinge kinks; correctness is checked against a grid oracle in
the tests, not assumed from the solver.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

_POLISH_MAX_DIM = 20


class SvrError(ValueError):
    pass


@dataclass
class SvrModel:
    w: np.ndarray
    b: float
    eps: float
    C: float
    objective_trace: list = field(default_factory=list, repr=False)


def svr_objective(w, b, X, y, eps, C):
    r = X @ w + b - y
    return 0.5 * float(np.dot(w, w)) + C * float(
        np.sum(np.maximum(0.0, np.abs(r) - eps))
    )


def fit_svr(X, y, eps=0.05, C=10.0, max_iter=60000, seed=0):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, d = X.shape
    if n == 0:
        raise SvrError("empty training data")
    if np.any(~np.isfinite(X)) or np.any(~np.isfinite(y)):
        raise SvrError("non-finite values in training data")
    if eps < 0 or C <= 0:
        raise SvrError("need eps >= 0 and C > 0")

    lam = 1.0 / (C * n)
    rng = np.random.default_rng(seed)
    w = np.zeros(d)
    b = 0.0
    w_avg = np.zeros(d)
    b_avg = 0.0
    n_avg = 0
    avg_start = max_iter // 2
    best_obj = svr_objective(w, b, X, y, eps, C)
    best = (w.copy(), b)
    trace = [best_obj]

    for t in range(1, max_iter + 1):
        i = rng.integers(n)
        r = X[i] @ w + b - y[i]
        eta = 1.0 / (lam * t)
        g_w = lam * w
        g_b = 0.0
        if abs(r) > eps:
            s = np.sign(r)
            g_w = g_w + s * X[i]
            g_b = s
        w -= eta * g_w
        b -= eta * g_b
        if t > avg_start:
            n_avg += 1
            w_avg += (w - w_avg) / n_avg
            b_avg += (b - b_avg) / n_avg
        if t % 100 == 0:
            cand_w, cand_b = (w_avg, b_avg) if n_avg else (w, b)
            obj = svr_objective(cand_w, cand_b, X, y, eps, C)
            if obj < best_obj:
                best_obj = obj
                best = (cand_w.copy(), float(cand_b))
            trace.append(best_obj)

    w, b = best
    if d <= _POLISH_MAX_DIM:
        res = minimize(
            lambda p: svr_objective(p[:-1], p[-1], X, y, eps, C),
            np.concatenate([w, [b]]),
            method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 20000},
        )
        if res.fun < best_obj:
            w, b = res.x[:-1], float(res.x[-1])
            best_obj = float(res.fun)
            trace.append(best_obj)
    return SvrModel(np.atleast_1d(w), float(b), eps, C, trace)


def predict_svr(model, x):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.shape[1] != model.w.size:
        raise SvrError(f"feature width {X.shape[1]} != model width {model.w.size}")
    out = X @ model.w + model.b
    return float(out[0]) if single else out
