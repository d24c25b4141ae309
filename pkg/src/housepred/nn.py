"""Minimal dense/conv layer stack with exact reverse-mode gradients.

Everything is double precision numpy.  Layers cache their forward inputs
in train mode and release gradients on backward; a Sequential composes
them.  Conv is 3x3, stride 1, no padding; pooling is 2x2 with floor
semantics.  The output side of a valid convolution is
floor((in - k + 2 * padding) / stride) + 1.
"""

import struct

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class Layer:
    kind = "?"

    def __init__(self):
        self.params = []
        self.grads = []
        self._cache = None

    def forward(self, x, train=False):
        raise NotImplementedError

    def backward(self, grad):
        raise NotImplementedError

    def zero_grad(self):
        for g in self.grads:
            g.fill(0.0)

    def state_arrays(self):
        """Arrays persisted in checkpoints (trainable params by default)."""
        return self.params

    def _require_cache(self):
        if self._cache is None:
            raise RuntimeError(f"{self.kind}: backward called before forward")


def _init_weights(rng, shape, fan_in, fan_out, init):
    if init == "he":
        limit = np.sqrt(6.0 / fan_in)
    elif init == "xavier":
        limit = np.sqrt(6.0 / (fan_in + fan_out))
    else:
        raise ValueError(f"unknown init {init!r}")
    return rng.uniform(-limit, limit, size=shape)


class Dense(Layer):
    kind = "dense"

    def __init__(self, in_dim, out_dim, rng=None, init="he"):
        super().__init__()
        self.in_dim, self.out_dim = in_dim, out_dim
        rng = rng or np.random.default_rng(0)
        W = _init_weights(rng, (in_dim, out_dim), in_dim, out_dim, init)
        b = np.zeros(out_dim)
        self.params = [W, b]
        self.grads = [np.zeros_like(W), np.zeros_like(b)]

    def forward(self, x, train=False):
        if x.shape[1] != self.in_dim:
            raise ValueError(f"dense: input width {x.shape[1]} != {self.in_dim}")
        self._cache = x if train else None
        return x @ self.params[0] + self.params[1]

    def backward(self, grad):
        self._require_cache()
        x = self._cache
        self.grads[0] += x.T @ grad
        self.grads[1] += grad.sum(axis=0)
        return grad @ self.params[0].T


class Conv2D(Layer):
    kind = "conv2d"
    k = 3  # fixed 3x3 kernel, stride 1, no padding

    def __init__(self, in_ch, out_ch, rng=None, init="he"):
        super().__init__()
        self.in_ch, self.out_ch = in_ch, out_ch
        rng = rng or np.random.default_rng(0)
        fan_in = in_ch * self.k * self.k
        W = _init_weights(rng, (out_ch, in_ch, self.k, self.k), fan_in,
                          out_ch * self.k * self.k, init)
        b = np.zeros(out_ch)
        self.params = [W, b]
        self.grads = [np.zeros_like(W), np.zeros_like(b)]
        self._bufs = {}

    def _buffer(self, name, shape, dtype):
        # Reused scratch arrays: repeated fresh allocations of these
        # multi-megabyte temporaries cost more in page faults than the
        # arithmetic they feed.  Safe because each buffer is dead before
        # the same method runs again in a sequential forward/backward pass.
        buf = self._bufs.get(name)
        if buf is None or buf.shape != shape or buf.dtype != dtype:
            buf = np.empty(shape, dtype=dtype)
            self._bufs[name] = buf
        return buf

    def _im2col(self, x, oh, ow, train):
        # (n, c*k*k, oh*ow) patch matrix built from k*k nearly-contiguous
        # slice copies; keeps the subsequent products as plain batched GEMMs.
        n, c = x.shape[:2]
        name = "col_train" if train else "col_eval"
        col = self._buffer(name, (n, c, self.k, self.k, oh, ow), x.dtype)
        for di in range(self.k):
            for dj in range(self.k):
                col[:, :, di, dj] = x[:, :, di : di + oh, dj : dj + ow]
        return col.reshape(n, c * self.k * self.k, oh * ow)

    def forward(self, x, train=False):
        n, c, h, w = x.shape
        if c != self.in_ch:
            raise ValueError(f"conv2d: {c} input channels, expected {self.in_ch}")
        if h < self.k or w < self.k:
            raise ValueError(f"conv2d: input {h}x{w} smaller than {self.k}x{self.k} kernel")
        oh, ow = h - self.k + 1, w - self.k + 1
        col = self._im2col(x, oh, ow, train)
        Wm = self.params[0].reshape(self.out_ch, -1)
        y = np.matmul(Wm, col).reshape(n, self.out_ch, oh, ow)
        y += self.params[1][:, None, None]
        self._cache = (x.shape, col) if train else None
        return y

    def backward(self, grad):
        self._require_cache()
        (n, c, h, w), col = self._cache
        oh, ow = h - self.k + 1, w - self.k + 1
        f = c * self.k * self.k
        gm = grad.reshape(n, self.out_ch, oh * ow)
        Wm = self.params[0].reshape(self.out_ch, -1)
        gW = np.matmul(gm, col.transpose(0, 2, 1)).sum(axis=0)
        self.grads[0] += gW.reshape(self.params[0].shape)
        self.grads[1] += gm.sum(axis=(0, 2))
        dcol = self._buffer("dcol", (n, f, oh * ow), grad.dtype)
        np.matmul(Wm.T, gm, out=dcol)
        dcol = dcol.reshape(n, c, self.k, self.k, oh, ow)
        dx = self._buffer("dx", (n, c, h, w), grad.dtype)
        dx.fill(0.0)
        for di in range(self.k):
            for dj in range(self.k):
                dx[:, :, di : di + oh, dj : dj + ow] += dcol[:, :, di, dj]
        return dx


class ReLU(Layer):
    kind = "relu"

    def forward(self, x, train=False):
        self._cache = (x > 0) if train else None
        return np.maximum(x, 0.0)

    def backward(self, grad):
        self._require_cache()
        return grad * self._cache


class Sigmoid(Layer):
    kind = "sigmoid"

    def forward(self, x, train=False):
        y = np.empty_like(x)
        pos = x >= 0
        y[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
        ex = np.exp(x[~pos])
        y[~pos] = ex / (1.0 + ex)
        self._cache = y if train else None
        return y

    def backward(self, grad):
        self._require_cache()
        s = self._cache
        return grad * s * (1.0 - s)


class LinearActivation(Layer):
    kind = "linear"

    def forward(self, x, train=False):
        self._cache = True
        return x

    def backward(self, grad):
        return grad


class Flatten(Layer):
    kind = "flatten"

    def forward(self, x, train=False):
        self._cache = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad):
        self._require_cache()
        return grad.reshape(self._cache)


class MaxPool(Layer):
    """2x2 non-overlapping max pooling; odd trailing rows/cols are dropped.

    Backward routes each window's gradient to the first maximum in
    row-major window order.
    """

    kind = "maxpool"
    p = 2

    def _window_views(self, x, oh, ow):
        # the four window corners, in row-major window order
        return [
            x[:, :, di : self.p * oh : self.p, dj : self.p * ow : self.p]
            for di in range(self.p)
            for dj in range(self.p)
        ]

    def forward(self, x, train=False):
        n, c, h, w = x.shape
        if h < self.p or w < self.p:
            raise ValueError(f"maxpool: input {h}x{w} smaller than {self.p}x{self.p}")
        oh, ow = h // self.p, w // self.p
        views = self._window_views(x, oh, ow)
        out = views[0].copy()
        for v in views[1:]:
            np.maximum(out, v, out=out)
        if train:
            self._cache = (x, out)
        return out

    def backward(self, grad):
        self._require_cache()
        x, out = self._cache
        n, c, h, w = x.shape
        oh, ow = h // self.p, w // self.p
        dx = np.zeros((n, c, h, w), dtype=grad.dtype)
        taken = np.zeros(grad.shape, dtype=bool)
        for v, dv in zip(self._window_views(x, oh, ow),
                         self._window_views(dx, oh, ow)):
            # route each window's gradient to its first maximum only;
            # stride-2 windows never overlap, so a masked copy suffices
            hit = (v == out) & ~taken
            np.copyto(dv, grad, where=hit)
            taken |= hit
        return dx


class BatchNorm(Layer):
    """Per-channel batch normalization for (n, C) or (n, C, H, W) inputs."""

    kind = "batchnorm"

    def __init__(self, channels, eps=1e-5, momentum=0.9):
        super().__init__()
        self.channels = channels
        self.eps = eps
        self.momentum = momentum
        gamma = np.ones(channels)
        beta = np.zeros(channels)
        self.params = [gamma, beta]
        self.grads = [np.zeros_like(gamma), np.zeros_like(beta)]
        self.running_mean = np.zeros(channels)
        self.running_var = np.ones(channels)

    def state_arrays(self):
        return self.params + [self.running_mean, self.running_var]

    def _axes_and_shape(self, x):
        if x.ndim == 2:
            return (0,), (1, self.channels)
        if x.ndim == 4:
            return (0, 2, 3), (1, self.channels, 1, 1)
        raise ValueError(f"batchnorm: unsupported input rank {x.ndim}")

    def forward(self, x, train=False):
        axes, bshape = self._axes_and_shape(x)
        gamma = self.params[0].reshape(bshape)
        beta = self.params[1].reshape(bshape)
        if train:
            if x.shape[0] < 2:
                raise ValueError("batchnorm: train mode needs batch size >= 2")
            mean, var = self._moments(x, axes)
            m = self.momentum
            self.running_mean = m * self.running_mean + (1 - m) * mean
            self.running_var = m * self.running_var + (1 - m) * var
            std = np.sqrt(var + self.eps).reshape(bshape)
            xhat = x - mean.reshape(bshape)
            xhat /= std
            y = xhat * gamma
            y += beta
            self._cache = (xhat, std, axes, bshape)
            return y
        std = np.sqrt(self.running_var + self.eps).reshape(bshape)
        xhat = (x - self.running_mean.reshape(bshape)) / std
        return gamma * xhat + beta

    @staticmethod
    def _moments(x, axes):
        """Single-pass channel sums; cheaper than separate mean/var passes."""
        cnt = np.prod([x.shape[a] for a in axes])
        if x.ndim == 4:
            s1 = np.einsum("nchw->c", x)
            s2 = np.einsum("nchw,nchw->c", x, x)
        else:
            s1 = x.sum(axis=0)
            s2 = np.einsum("nc,nc->c", x, x)
        mean = s1 / cnt
        var = np.maximum(s2 / cnt - mean**2, 0.0)
        return mean, var

    @staticmethod
    def _channel_sums(grad, xhat):
        if grad.ndim == 4:
            return np.einsum("nchw->c", grad), np.einsum("nchw,nchw->c", grad, xhat)
        return grad.sum(axis=0), np.einsum("nc,nc->c", grad, xhat)

    def backward(self, grad):
        self._require_cache()
        xhat, std, axes, bshape = self._cache
        gamma = self.params[0].reshape(bshape)
        count = np.prod([xhat.shape[a] for a in axes])
        gsum, gdot = self._channel_sums(grad, xhat)
        self.grads[0] += gdot
        self.grads[1] += gsum
        dx = xhat * (gdot / count).reshape(bshape)
        np.subtract(grad, dx, out=dx)
        dx -= (gsum / count).reshape(bshape)
        dx *= gamma / std
        return dx


class Dropout(Layer):
    """Inverted dropout: train mode scales survivors by 1/(1-p)."""

    kind = "dropout"

    def __init__(self, p=0.5, seed=0):
        super().__init__()
        if not 0.0 <= p < 1.0:
            raise ValueError(f"dropout probability must lie in [0, 1), got {p}")
        self.p = p
        self.rng = np.random.default_rng(seed)

    def forward(self, x, train=False):
        if not train or self.p == 0.0:
            self._cache = None if not train else np.ones_like(x)
            return x
        mask = (self.rng.random(x.shape) >= self.p) / (1.0 - self.p)
        self._cache = mask
        return x * mask

    def backward(self, grad):
        self._require_cache()
        return grad * self._cache


class Sequential:
    """Ordered layer stack with a train/eval mode flag."""

    def __init__(self, layers):
        self.layers = list(layers)

    def forward(self, x, train=False):
        for layer in self.layers:
            x = layer.forward(x, train=train)
        return x

    def backward(self, grad):
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def param_pairs(self):
        out = []
        for layer in self.layers:
            out.extend(zip(layer.params, layer.grads))
        return out

    def zero_grad(self):
        for layer in self.layers:
            layer.zero_grad()


class Adam:
    """Bias-corrected Adam over a fixed list of parameter arrays."""

    def __init__(self, param_pairs, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.pairs = list(param_pairs)
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p, _ in self.pairs]
        self.v = [np.zeros_like(p) for p, _ in self.pairs]
        self.t = 0

    def step(self):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1.0 - b1 ** self.t
        c2 = 1.0 - b2 ** self.t
        for (p, g), m, v in zip(self.pairs, self.m, self.v):
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


class SGD:
    def __init__(self, param_pairs, lr=1e-2):
        self.pairs = list(param_pairs)
        self.lr = lr

    def step(self):
        for p, g in self.pairs:
            p -= self.lr * g


# --- checkpoint format -------------------------------------------------------
# magic "MVTS1", then one record per layer: u8 kind tag, u8 array count,
# then per array: i64 ndim, i64 dims..., f64 data (all little-endian).

CHECKPOINT_MAGIC = b"MVTS1"

_KIND_TAGS = {
    "dense": 1, "conv2d": 2, "relu": 3, "sigmoid": 4, "batchnorm": 5,
    "maxpool": 6, "flatten": 7, "dropout": 8, "linear": 9,
}


def cast_layers(layers, dtype):
    """Cast parameters, gradients, and running state in place.

    Call before handing param_pairs to an optimizer; existing optimizer
    state keeps references to the old arrays.
    """
    dtype = np.dtype(dtype)
    for layer in layers:
        layer.params[:] = [p.astype(dtype) for p in layer.params]
        layer.grads[:] = [g.astype(dtype) for g in layer.grads]
        if isinstance(layer, BatchNorm):
            layer.running_mean = layer.running_mean.astype(dtype)
            layer.running_var = layer.running_var.astype(dtype)


def save_layers(layers, fh):
    fh.write(CHECKPOINT_MAGIC)
    for layer in layers:
        arrays = layer.state_arrays()
        fh.write(struct.pack("<BB", _KIND_TAGS[layer.kind], len(arrays)))
        for a in arrays:
            fh.write(struct.pack("<q", a.ndim))
            fh.write(struct.pack(f"<{a.ndim}q", *a.shape))
            fh.write(a.astype("<f8").tobytes())


def load_layers(layers, fh):
    """Restore state into an already-built layer list (shapes must match)."""
    magic = fh.read(len(CHECKPOINT_MAGIC))
    if magic != CHECKPOINT_MAGIC:
        raise ValueError("not a model checkpoint (bad magic bytes)")
    for layer in layers:
        tag, count = struct.unpack("<BB", fh.read(2))
        if tag != _KIND_TAGS[layer.kind]:
            raise ValueError(f"checkpoint layer tag {tag} does not match {layer.kind!r}")
        arrays = layer.state_arrays()
        if count != len(arrays):
            raise ValueError(f"{layer.kind}: checkpoint has {count} arrays, expected {len(arrays)}")
        for a in arrays:
            (ndim,) = struct.unpack("<q", fh.read(8))
            shape = struct.unpack(f"<{ndim}q", fh.read(8 * ndim))
            if tuple(shape) != a.shape:
                raise ValueError(f"{layer.kind}: checkpoint shape {shape} != {a.shape}")
            size = int(np.prod(shape)) if ndim else 1
            data = np.frombuffer(fh.read(8 * size), dtype="<f8").reshape(shape)
            a[...] = data


def save_checkpoint(layers, path):
    with open(path, "wb") as fh:
        save_layers(layers, fh)


def load_checkpoint(layers, path):
    with open(path, "rb") as fh:
        load_layers(layers, fh)


def numeric_gradient(f, array, step=1e-6, indices=None):
    """Central finite differences of scalar f with respect to array entries.

    ``indices`` restricts the check to a subset of flat positions;
    returns a dict mapping flat index -> derivative estimate.
    """
    flat = array.reshape(-1)
    if indices is None:
        indices = range(flat.size)
    out = {}
    for i in indices:
        old = flat[i]
        flat[i] = old + step
        fp = f()
        flat[i] = old - step
        fm = f()
        flat[i] = old
        out[i] = (fp - fm) / (2.0 * step)
    return out
