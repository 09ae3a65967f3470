"""Estimate instance segmentation quality without ground truth.

The package trains a small convolutional regressor to predict, from an
image and a candidate segmentation alone, the quality score that a full
reference-based evaluation would assign. Training data is manufactured:
ground-truth maps are corrupted by random morphology and smooth elastic
warps, and each corrupted map is labeled with its exactly computed score.

Submodules are imported lazily so that ``import qanet`` stays cheap and the
command line tool can pin BLAS thread counts before numpy loads.
"""

from __future__ import annotations

import importlib

__version__ = "0.1.0"

_EXPORTS = {
    "ArchConfig": "ribcage",
    "CorruptedPair": "corruption",
    "CorruptionParams": "corruption",
    "HitRateCurve": "measures",
    "PhantomConfig": "phantom",
    "QANet": "ribcage",
    "QANetRegressor": "estimators",
    "SegmentationCorruptor": "estimators",
    "TrainConfig": "ribcage",
    "apply_morphology": "corruption",
    "best_dice": "measures",
    "connected_components": "segmap",
    "corrupt": "corruption",
    "cross_method_score": "measures",
    "dice": "measures",
    "hit_rate_curve": "measures",
    "instance_to_trinary": "segmap",
    "iou": "measures",
    "load_checkpoint": "ribcage",
    "make_dataset": "phantom",
    "mse": "measures",
    "sample_coverage_params": "corruption",
    "sample_params": "corruption",
    "sample_smooth_field": "corruption",
    "save_checkpoint": "ribcage",
    "seg_measure": "measures",
    "synth_phantom": "phantom",
    "trinary_to_instances": "segmap",
    "warp_labels": "corruption",
}

_SUBMODULES = {
    "cli",
    "corruption",
    "estimators",
    "manifest",
    "measures",
    "phantom",
    "pngio",
    "ribcage",
    "segmap",
    "validation",
}

__all__ = sorted(_EXPORTS) + ["__version__"]


def __getattr__(name):
    if name in _EXPORTS:
        module = importlib.import_module("." + _EXPORTS[name], __name__)
        return getattr(module, name)
    if name in _SUBMODULES:
        return importlib.import_module("." + name, __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(set(__all__) | _SUBMODULES)
