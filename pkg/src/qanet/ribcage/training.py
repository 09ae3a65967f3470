"""Mini-batch training loop and manifest-backed dataset loading.

Training minimizes the mean squared error between raw network outputs and
the true quality scores. Raw outputs are used for the loss; only reported
predictions are clamped to [0, 1]. One metrics row is recorded per epoch:
the running train MSE (under training-mode statistics) plus validation MSE
and validation hit-rate AUC from clamped inference-mode predictions.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

import numpy as np

from ..manifest import ManifestRow, write_manifest
from ..measures import hit_rate_curve, mse
from ..pngio import load_instance_map, load_intensity_image
from .checkpoint import save_checkpoint
from .network import ArchConfig, QANet, encode_seg_batch, standardize_image, standardize_seg
from .optim import OPTIMIZERS, make_optimizer

METRIC_FIELDS = ["epoch", "train_mse", "val_mse", "val_auc"]


@dataclass(frozen=True)
class TrainConfig:
    optimizer: str = "adam"
    learning_rate: float = 1e-3
    batch_size: int = 16
    epochs: int = 30
    bn_momentum: float = 0.9
    sgd_momentum: float = 0.9
    seed: int = 0
    checkpoint_every: int = 0

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"unknown optimizer {self.optimizer!r}, expected one of {OPTIMIZERS}")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be positive")
        if not 0.0 <= self.bn_momentum < 1.0:
            raise ValueError("bn_momentum must lie in [0, 1)")
        if self.checkpoint_every < 0:
            raise ValueError("checkpoint_every must be non-negative")

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown training config fields: {sorted(unknown)}")
        return cls(**d)


@dataclass
class PairDataset:
    """Pre-standardized pairs: images as network input, segs as trinary maps
    (encoded to channels per batch, so both encodings share one dataset)."""

    ids: list[str]
    images: np.ndarray
    tris: np.ndarray
    q: np.ndarray | None

    def __len__(self):
        return len(self.ids)


def load_pairs(rows: list[ManifestRow], cfg: ArchConfig, require_truth: bool) -> PairDataset:
    """Load the image and evaluated segmentation of every manifest row.

    Ground-truth columns are deliberately never touched here: the network
    sees only what a real caller without ground truth would have.
    """
    ids, images, tris = [], [], []
    q = [] if require_truth else None
    for row in rows:
        if row.image is None or row.eval_seg is None:
            raise ValueError(f"row {row.id!r} needs both image and eval_seg columns")
        img = standardize_image(load_intensity_image(row.image), cfg.input_size, cfg.image_channels)
        tri = standardize_seg(load_instance_map(row.eval_seg), cfg.input_size)
        ids.append(row.id)
        images.append(img)
        tris.append(tri)
        if require_truth:
            if row.true_q is None:
                raise ValueError(f"row {row.id!r} is missing true_q")
            q.append(row.true_q)
    return PairDataset(
        ids=ids,
        images=np.stack(images),
        tris=np.stack(tris),
        q=np.asarray(q, dtype=np.float64) if require_truth else None,
    )


def dataset_from_arrays(images, instance_maps, q, cfg: ArchConfig) -> PairDataset:
    """Build a dataset straight from in-memory arrays (estimator entry point)."""
    imgs = [standardize_image(im, cfg.input_size, cfg.image_channels) for im in images]
    tris = [standardize_seg(m, cfg.input_size) for m in instance_maps]
    ids = [str(i) for i in range(len(imgs))]
    qarr = None
    if q is not None:
        qarr = np.asarray(q, dtype=np.float64).ravel()
        if qarr.size != len(imgs):
            raise ValueError("quality vector length does not match the number of pairs")
    return PairDataset(ids=ids, images=np.stack(imgs), tris=np.stack(tris), q=qarr)


def predict_dataset(net: QANet, ds: PairDataset, batch_size: int = 64) -> np.ndarray:
    """Clamped inference-mode predictions for a whole dataset."""
    preds = []
    for start in range(0, len(ds), batch_size):
        imgs = ds.images[start : start + batch_size]
        segs = encode_seg_batch(ds.tris[start : start + batch_size], net.cfg.input_encoding)
        preds.append(net.infer(imgs, segs))
    return np.concatenate(preds).astype(np.float64)


def fit(net: QANet, train_ds: PairDataset, val_ds: PairDataset | None, tcfg: TrainConfig,
        out_dir: str | None = None, log=None) -> list[dict]:
    """Train in place; returns one metrics dict per epoch.

    The epoch shuffle stream is seeded independently of the weight init, so
    reruns with identical configs reproduce the exact same batches. When
    ``out_dir`` is given, metrics.csv and model.qant land there (plus
    periodic checkpoints if checkpoint_every is set).
    """
    if train_ds.q is None:
        raise ValueError("training dataset has no true_q scores")
    if val_ds is not None and val_ds.q is None:
        raise ValueError("validation dataset has no true_q scores")
    net.set_bn_momentum(tcfg.bn_momentum)
    opt = make_optimizer(
        tcfg.optimizer, net.parameters(), tcfg.learning_rate, sgd_momentum=tcfg.sgd_momentum
    )
    rng = np.random.default_rng(np.random.SeedSequence([int(tcfg.seed), 1]))
    n = len(train_ds)
    encoding = net.cfg.input_encoding
    metrics: list[dict] = []
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)

    for epoch in range(1, tcfg.epochs + 1):
        perm = rng.permutation(n)
        sse = 0.0
        for start in range(0, n, tcfg.batch_size):
            idx = perm[start : start + tcfg.batch_size]
            imgs = train_ds.images[idx]
            segs = encode_seg_batch(train_ds.tris[idx], encoding)
            truth = train_ds.q[idx]
            net.zero_grad()
            pred = net.forward(imgs, segs, train=True)
            err = pred.astype(np.float64) - truth
            sse += float(np.dot(err, err))
            net.backward((2.0 / idx.size) * err)
            opt.step()
        row = {"epoch": epoch, "train_mse": sse / n}
        if val_ds is not None:
            val_pred = predict_dataset(net, val_ds)
            row["val_mse"] = mse(val_pred, val_ds.q)
            row["val_auc"] = hit_rate_curve(val_pred, val_ds.q).auc
        metrics.append(row)
        if log is not None:
            log(
                " ".join(
                    f"{key}={value:.6f}" if key != "epoch" else f"epoch={value}"
                    for key, value in row.items()
                )
            )
        if out_dir and tcfg.checkpoint_every and epoch % tcfg.checkpoint_every == 0:
            save_checkpoint(os.path.join(out_dir, f"checkpoint_ep{epoch:03d}.qant"), net)

    if out_dir:
        save_checkpoint(os.path.join(out_dir, "model.qant"), net)
        fields = METRIC_FIELDS if val_ds is not None else METRIC_FIELDS[:2]
        write_manifest(os.path.join(out_dir, "metrics.csv"), metrics, fields)
    return metrics
