"""In-place optimizers over (name, value, grad) parameter triples."""

from __future__ import annotations

import numpy as np


class Adam:
    """Adam with bias correction; state lives per parameter array."""

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = [np.zeros_like(v) for _, v, _ in self.params]
        self._v = [np.zeros_like(v) for _, v, _ in self.params]

    def step(self):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bc1 = 1.0 - b1**self.t
        bc2 = 1.0 - b2**self.t
        for (_, value, grad), m, v in zip(self.params, self._m, self._v):
            m *= b1
            m += (1.0 - b1) * grad
            v *= b2
            v += (1.0 - b2) * grad * grad
            value -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


class SGDMomentum:
    """Classical momentum: velocity = mu * velocity + grad."""

    def __init__(self, params, lr=1e-2, momentum=0.9):
        self.params = list(params)
        self.lr = lr
        self.momentum = momentum
        self._vel = [np.zeros_like(v) for _, v, _ in self.params]

    def step(self):
        for (_, value, grad), vel in zip(self.params, self._vel):
            vel *= self.momentum
            vel += grad
            value -= self.lr * vel


OPTIMIZERS = ("adam", "sgd")


def make_optimizer(name: str, params, lr: float, sgd_momentum: float = 0.9):
    if name == "adam":
        return Adam(params, lr=lr)
    if name == "sgd":
        return SGDMomentum(params, lr=lr, momentum=sgd_momentum)
    raise ValueError(f"unknown optimizer {name!r}, expected one of {OPTIMIZERS}")
