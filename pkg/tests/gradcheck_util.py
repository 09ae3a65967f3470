"""Finite-difference gradient checking for the regression networks.

Everything runs in float64. The check perturbs every parameter element with
central differences and compares against the analytic gradient from one
forward/backward pass. Batch-norm running statistics mutate during the extra
forwards, which is harmless: training-mode loss depends only on batch
statistics.
"""

from __future__ import annotations

import numpy as np

from qanet.ribcage import QANet, encode_seg_batch


def make_toy_inputs(cfg, seed, n=4):
    rng = np.random.default_rng(seed)
    imgs = rng.random((n, cfg.input_size, cfg.input_size, cfg.image_channels))
    tris = rng.integers(0, 3, (n, cfg.input_size, cfg.input_size)).astype(np.uint8)
    segs = encode_seg_batch(tris, cfg.input_encoding).astype(np.float64)
    targets = rng.random(n)
    return imgs, segs, targets


def max_grad_rel_error(cfg, seed=0, h=1e-4):
    """Worst relative error between analytic and numeric gradients."""
    net = QANet(cfg, seed=seed, dtype=np.float64)
    imgs, segs, targets = make_toy_inputs(cfg, seed + 1000)

    def loss_only():
        pred = net.forward(imgs, segs, train=True)
        return float(np.mean((pred - targets) ** 2))

    net.zero_grad()
    pred = net.forward(imgs, segs, train=True)
    err = pred - targets
    net.backward(2.0 * err / err.size)
    analytic = [(name, value, grad.copy()) for name, value, grad in net.parameters()]

    worst = 0.0
    for _, value, grad in analytic:
        flat_v = value.ravel()
        flat_g = grad.ravel()
        for i in range(flat_v.size):
            orig = flat_v[i]
            flat_v[i] = orig + h
            up = loss_only()
            flat_v[i] = orig - h
            down = loss_only()
            flat_v[i] = orig
            numeric = (up - down) / (2.0 * h)
            rel = abs(numeric - flat_g[i]) / max(abs(numeric), abs(flat_g[i]), 1e-6)
            worst = max(worst, rel)
    return worst
