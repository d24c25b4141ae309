"""Classic feed-forward baselines on tabular features.

The BP baseline is a single sigmoid hidden layer with a sigmoid output,
trained full-batch on halved squared error.  The ANN baseline is a ReLU
MLP with a linear head trained on MSE with mini-batch Adam.  Both expect
targets normalized strictly inside (0, 1).
"""

from dataclasses import dataclass

import numpy as np

from . import nn


@dataclass
class BpConfig:
    hidden: int = 16
    epochs: int = 500
    lr: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.hidden < 1:
            raise ValueError("hidden units must be >= 1")


@dataclass
class AnnConfig:
    widths: tuple = (32, 32)
    epochs: int = 200
    lr: float = 1e-3
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        self.widths = tuple(self.widths)
        if any(w < 1 for w in self.widths):
            raise ValueError("all hidden widths must be >= 1")


def _check_unit_targets(y):
    y = np.asarray(y, dtype=np.float64)
    if np.any(y <= 0) or np.any(y >= 1):
        raise ValueError("targets must lie strictly inside (0, 1)")
    return y


def fit_bp(X, y, config=None):
    """Train the sigmoid network by full-batch gradient descent."""
    config = config or BpConfig()
    X = np.asarray(X, dtype=np.float64)
    y = _check_unit_targets(y)
    rng = np.random.default_rng(config.seed)
    net = nn.Sequential([
        nn.Dense(X.shape[1], config.hidden, rng, init="xavier"), nn.Sigmoid(),
        nn.Dense(config.hidden, 1, rng, init="xavier"), nn.Sigmoid(),
    ])
    opt = nn.SGD(net.param_pairs(), lr=config.lr)
    losses = []
    for _ in range(config.epochs):
        out = net.forward(X, train=True)[:, 0]
        err = out - y
        losses.append(0.5 * float(np.mean(err**2)))
        net.backward((err / y.size)[:, None])
        opt.step()
        net.zero_grad()
    net.train_losses = losses
    return net


def fit_ann(X, y, config=None):
    """Train the ReLU MLP with mini-batch Adam on MSE."""
    config = config or AnnConfig()
    X = np.asarray(X, dtype=np.float64)
    y = _check_unit_targets(y)
    rng = np.random.default_rng(config.seed)
    layers = []
    d = X.shape[1]
    for w in config.widths:
        layers += [nn.Dense(d, w, rng), nn.ReLU()]
        d = w
    layers += [nn.Dense(d, 1, rng, init="xavier"), nn.LinearActivation()]
    net = nn.Sequential(layers)
    opt = nn.Adam(net.param_pairs(), lr=config.lr)
    batch_rng = np.random.default_rng(config.seed + 1)
    losses = []
    n = y.size
    for _ in range(config.epochs):
        order = batch_rng.permutation(n)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            out = net.forward(X[idx], train=True)[:, 0]
            err = out - y[idx]
            epoch_loss += float(np.mean(err**2))
            net.backward((2.0 * err / idx.size)[:, None])
            opt.step()
            net.zero_grad()
            n_batches += 1
        losses.append(epoch_loss / max(n_batches, 1))
    net.train_losses = losses
    return net


def predict_baseline(net, X, price_scaler=None):
    """Eval-mode prediction, inverse-scaled to price units when given."""
    X = np.asarray(X, dtype=np.float64)
    out = net.forward(X, train=False)[:, 0]
    if price_scaler is None:
        return out
    return price_scaler.inverse(out[:, None])[:, 0]
