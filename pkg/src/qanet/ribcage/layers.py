"""Plain-numpy network layers with explicit backward passes.

Everything runs in NHWC layout. Each layer caches what its backward pass
needs during forward, accumulates parameter gradients in matching ``d*``
buffers, and returns the gradient with respect to its input. ``params()``
yields (name, value, grad) triples for the optimizer; ``tensors()`` yields
(name, array) pairs for checkpointing, which for batch norm includes the
running statistics.
"""

from __future__ import annotations

import numpy as np

KERNEL = 3
STRIDE = 2
PAD = 1


def out_hw(size: int) -> int:
    """Spatial size after one stride-2 3x3 convolution with padding 1."""
    return (size + 2 * PAD - KERNEL) // STRIDE + 1


class Conv2d:
    """3x3 convolution, stride 2, zero padding 1; halves each spatial dim.

    Weights are (3, 3, in_ch, out_ch), He-initialized from the shared rng so
    construction order fixes every draw. The forward pass lowers the input to
    column form with nine strided slices (one per kernel tap) and runs a
    single matmul.
    """

    def __init__(self, in_ch, out_ch, rng, name, bias=True, dtype=np.float32):
        fan_in = KERNEL * KERNEL * in_ch
        scale = np.sqrt(2.0 / fan_in)
        self.w = (rng.standard_normal((KERNEL, KERNEL, in_ch, out_ch)) * scale).astype(dtype)
        self.b = np.zeros(out_ch, dtype=dtype) if bias else None
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b) if bias else None
        self.name = name
        self._cols = None
        self._in_shape = None

    def forward(self, x):
        n, h, w, c = x.shape
        oh, ow = out_hw(h), out_hw(w)
        xp = np.pad(x, ((0, 0), (PAD, PAD), (PAD, PAD), (0, 0)))
        cols = np.empty((n, oh, ow, KERNEL, KERNEL, c), dtype=x.dtype)
        for kh in range(KERNEL):
            for kw in range(KERNEL):
                cols[:, :, :, kh, kw, :] = xp[
                    :, kh : kh + STRIDE * oh : STRIDE, kw : kw + STRIDE * ow : STRIDE, :
                ]
        cols_mat = cols.reshape(n * oh * ow, KERNEL * KERNEL * c)
        out = cols_mat @ self.w.reshape(KERNEL * KERNEL * c, -1)
        if self.b is not None:
            out += self.b
        self._cols = cols_mat
        self._in_shape = (n, h, w, c)
        return out.reshape(n, oh, ow, -1)

    def backward(self, d):
        n, h, w, c = self._in_shape
        oh, ow = out_hw(h), out_hw(w)
        dmat = d.reshape(n * oh * ow, -1)
        self.dw += (self._cols.T @ dmat).reshape(self.w.shape)
        if self.b is not None:
            self.db += dmat.sum(axis=0)
        dcols = (dmat @ self.w.reshape(KERNEL * KERNEL * c, -1).T).reshape(
            n, oh, ow, KERNEL, KERNEL, c
        )
        dxp = np.zeros((n, h + 2 * PAD, w + 2 * PAD, c), dtype=d.dtype)
        for kh in range(KERNEL):
            for kw in range(KERNEL):
                dxp[
                    :, kh : kh + STRIDE * oh : STRIDE, kw : kw + STRIDE * ow : STRIDE, :
                ] += dcols[:, :, :, kh, kw, :]
        return dxp[:, PAD : PAD + h, PAD : PAD + w, :]

    def params(self):
        yield (self.name + ".w", self.w, self.dw)
        if self.b is not None:
            yield (self.name + ".b", self.b, self.db)

    def tensors(self):
        yield (self.name + ".w", self.w)
        if self.b is not None:
            yield (self.name + ".b", self.b)


class BatchNorm2d:
    """Per-channel batch normalization over the (N, H, W) axes.

    Training mode normalizes with biased batch statistics and folds them into
    the running estimates as running = momentum * running + (1 - momentum) *
    batch. Inference mode uses the running estimates only.
    """

    def __init__(self, ch, name, momentum=0.9, eps=1e-5, dtype=np.float32):
        self.gamma = np.ones(ch, dtype=dtype)
        self.beta = np.zeros(ch, dtype=dtype)
        self.dgamma = np.zeros_like(self.gamma)
        self.dbeta = np.zeros_like(self.beta)
        self.run_mean = np.zeros(ch, dtype=dtype)
        self.run_var = np.ones(ch, dtype=dtype)
        self.momentum = momentum
        self.eps = eps
        self.name = name
        self._xhat = None
        self._invstd = None

    def forward(self, x, train):
        if train:
            mu = x.mean(axis=(0, 1, 2))
            var = x.var(axis=(0, 1, 2))
            self.run_mean *= self.momentum
            self.run_mean += (1.0 - self.momentum) * mu
            self.run_var *= self.momentum
            self.run_var += (1.0 - self.momentum) * var
        else:
            mu = self.run_mean
            var = self.run_var
        invstd = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mu) * invstd
        if train:
            self._xhat = xhat
            self._invstd = invstd
        return self.gamma * xhat + self.beta

    def backward(self, d):
        xhat = self._xhat
        m = float(xhat.shape[0] * xhat.shape[1] * xhat.shape[2])
        self.dgamma += (d * xhat).sum(axis=(0, 1, 2))
        self.dbeta += d.sum(axis=(0, 1, 2))
        dxhat = d * self.gamma
        s1 = dxhat.sum(axis=(0, 1, 2))
        s2 = (dxhat * xhat).sum(axis=(0, 1, 2))
        return (self._invstd / m) * (m * dxhat - s1 - xhat * s2)

    def params(self):
        yield (self.name + ".gamma", self.gamma, self.dgamma)
        yield (self.name + ".beta", self.beta, self.dbeta)

    def tensors(self):
        yield (self.name + ".gamma", self.gamma)
        yield (self.name + ".beta", self.beta)
        yield (self.name + ".run_mean", self.run_mean)
        yield (self.name + ".run_var", self.run_var)


class ReLU:
    def __init__(self):
        self._mask = None

    def forward(self, x):
        self._mask = x > 0
        return x * self._mask

    def backward(self, d):
        return d * self._mask


class Dense:
    """Fully connected layer; weights (in, out), He-initialized."""

    def __init__(self, in_dim, out_dim, rng, name, dtype=np.float32):
        scale = np.sqrt(2.0 / in_dim)
        self.w = (rng.standard_normal((in_dim, out_dim)) * scale).astype(dtype)
        self.b = np.zeros(out_dim, dtype=dtype)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)
        self.name = name
        self._x = None

    def forward(self, x):
        self._x = x
        return x @ self.w + self.b

    def backward(self, d):
        self.dw += self._x.T @ d
        self.db += d.sum(axis=0)
        return d @ self.w.T

    def params(self):
        yield (self.name + ".w", self.w, self.dw)
        yield (self.name + ".b", self.b, self.db)

    def tensors(self):
        yield (self.name + ".w", self.w)
        yield (self.name + ".b", self.b)
