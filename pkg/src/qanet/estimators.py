"""Scikit-learn style wrappers around the functional core.

``QANetRegressor`` is a fit/predict estimator whose samples are
(image, instance_map) pairs and whose targets are quality scores in [0, 1].
``SegmentationCorruptor`` is a stateless transformer that maps instance maps
to corrupted instance maps, optionally returning the exact score of each
corruption so the two together reproduce the full training pipeline:
corrupt ground truth, fit the regressor on the corrupted pairs.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin

from .corruption import DOMAINS, corrupt, derive_seed, sample_params
from .measures import MEASURES
from .ribcage import (
    ArchConfig,
    QANet,
    TrainConfig,
    dataset_from_arrays,
    fit,
    load_checkpoint,
    predict_dataset,
    save_checkpoint,
)


def _unzip_pairs(X):
    pairs = list(X)
    if not pairs:
        raise ValueError("X must contain at least one (image, instance_map) pair")
    for i, pair in enumerate(pairs):
        if len(pair) != 2:
            raise ValueError(f"X[{i}] is not an (image, instance_map) pair")
    images = [p[0] for p in pairs]
    maps = [p[1] for p in pairs]
    return images, maps


class QANetRegressor(BaseEstimator, RegressorMixin):
    """Regress segmentation quality from (image, instance_map) pairs.

    Parameters mirror the architecture and training configs one to one, so
    ``get_params`` / ``set_params`` and grid search work as usual. ``fit``
    expects X as a sequence of (image, instance_map) pairs and y as the true
    quality scores; ``predict`` returns clamped scores in [0, 1].
    """

    def __init__(
        self,
        variant="ribcage",
        input_size=64,
        input_encoding="trinary",
        image_channels=1,
        n_blocks=4,
        features_per_block=(8, 16, 32, 32),
        fc_widths=(64, 32),
        head_reads_ribs=False,
        optimizer="adam",
        learning_rate=1e-3,
        batch_size=16,
        epochs=30,
        bn_momentum=0.9,
        sgd_momentum=0.9,
        seed=0,
    ):
        self.variant = variant
        self.input_size = input_size
        self.input_encoding = input_encoding
        self.image_channels = image_channels
        self.n_blocks = n_blocks
        self.features_per_block = features_per_block
        self.fc_widths = fc_widths
        self.head_reads_ribs = head_reads_ribs
        self.optimizer = optimizer
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.bn_momentum = bn_momentum
        self.sgd_momentum = sgd_momentum
        self.seed = seed

    def _arch_config(self) -> ArchConfig:
        return ArchConfig(
            variant=self.variant,
            input_size=self.input_size,
            input_encoding=self.input_encoding,
            image_channels=self.image_channels,
            n_blocks=self.n_blocks,
            features_per_block=tuple(self.features_per_block),
            fc_widths=tuple(self.fc_widths),
            head_reads_ribs=self.head_reads_ribs,
        )

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            optimizer=self.optimizer,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            bn_momentum=self.bn_momentum,
            sgd_momentum=self.sgd_momentum,
            seed=self.seed,
        )

    def fit(self, X, y, validation=None):
        """Train on (image, instance_map) pairs against scores y.

        ``validation`` is an optional ((X_val, y_val)) tuple; when given,
        per-epoch validation MSE and hit-rate AUC land in ``history_``.
        """
        cfg = self._arch_config()
        images, maps = _unzip_pairs(X)
        train_ds = dataset_from_arrays(images, maps, y, cfg)
        val_ds = None
        if validation is not None:
            X_val, y_val = validation
            val_images, val_maps = _unzip_pairs(X_val)
            val_ds = dataset_from_arrays(val_images, val_maps, y_val, cfg)
        self.net_ = QANet(cfg, seed=self.seed)
        self.history_ = fit(self.net_, train_ds, val_ds, self._train_config())
        return self

    def predict(self, X):
        if not hasattr(self, "net_"):
            raise ValueError("this QANetRegressor is not fitted yet; call fit or load first")
        images, maps = _unzip_pairs(X)
        ds = dataset_from_arrays(images, maps, None, self.net_.cfg)
        return predict_dataset(self.net_, ds)

    def save(self, path: str):
        if not hasattr(self, "net_"):
            raise ValueError("nothing to save; fit the estimator first")
        save_checkpoint(path, self.net_)

    @classmethod
    def load(cls, path: str) -> "QANetRegressor":
        net = load_checkpoint(path)
        cfg = net.cfg
        est = cls(
            variant=cfg.variant,
            input_size=cfg.input_size,
            input_encoding=cfg.input_encoding,
            image_channels=cfg.image_channels,
            n_blocks=cfg.n_blocks,
            features_per_block=cfg.features_per_block,
            fc_widths=cfg.fc_widths,
            head_reads_ribs=cfg.head_reads_ribs,
        )
        est.net_ = net
        est.history_ = []
        return est


class SegmentationCorruptor(BaseEstimator, TransformerMixin):
    """Stateless transformer from instance maps to corrupted instance maps.

    Element ``i`` of X gets its own parameter draw from a seed derived as
    (seed, i), so a given corruptor instance is deterministic while every
    element still sees independent corruption parameters. ``transform``
    returns just the corrupted maps; ``transform_scored`` also returns the
    exact quality of each corruption and the parameters that produced it.
    """

    def __init__(self, domain="cells", measure="seg", seed=0):
        self.domain = domain
        self.measure = measure
        self.seed = seed

    def fit(self, X=None, y=None):
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}, expected one of {DOMAINS}")
        if self.measure not in MEASURES:
            raise ValueError(f"unknown measure {self.measure!r}, expected one of {MEASURES}")
        return self

    def transform(self, X):
        return [pair.corrupted for pair in self._corrupt_all(X)]

    def transform_scored(self, X):
        """Corrupt and score: returns (maps, true_q array, params list)."""
        pairs = self._corrupt_all(X)
        maps = [p.corrupted for p in pairs]
        scores = np.array([p.true_q for p in pairs], dtype=np.float64)
        params = [p.params for p in pairs]
        return maps, scores, params

    def _corrupt_all(self, X):
        self.fit()
        return [
            corrupt(m, sample_params(derive_seed(self.seed, i), self.domain), self.measure)
            for i, m in enumerate(X)
        ]
