"""From-scratch numpy implementation of the quality regression networks."""

from .checkpoint import load_checkpoint, save_checkpoint
from .network import (
    ENCODINGS,
    VARIANTS,
    ArchConfig,
    QANet,
    center_fit,
    encode_seg_batch,
    standardize_image,
    standardize_seg,
)
from .optim import OPTIMIZERS, Adam, SGDMomentum, make_optimizer
from .training import (
    PairDataset,
    TrainConfig,
    dataset_from_arrays,
    fit,
    load_pairs,
    predict_dataset,
)

__all__ = [
    "ENCODINGS",
    "OPTIMIZERS",
    "VARIANTS",
    "Adam",
    "ArchConfig",
    "PairDataset",
    "QANet",
    "SGDMomentum",
    "TrainConfig",
    "center_fit",
    "dataset_from_arrays",
    "encode_seg_batch",
    "fit",
    "load_checkpoint",
    "load_pairs",
    "make_optimizer",
    "predict_dataset",
    "save_checkpoint",
    "standardize_image",
    "standardize_seg",
]
