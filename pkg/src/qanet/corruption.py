"""Synthesize imperfect segmentations from ground truth, with exact scores.

A corruption runs in two stages. First a random morphological operation
(erode / dilate / open / close, or none) reshapes every instance
independently with a disc kernel, which can shrink instances away entirely
or push neighbors into each other. Second, a smooth random displacement
field warps the label map non-rigidly. Because the input is ground truth,
the true quality of the corrupted result is computed exactly alongside it,
giving (image, segmentation, score) training triples for the regressor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import measures
from .segmap import instance_labels
from .validation import check_instance_map

OPS = ("identity", "erode", "dilate", "open", "close")
DOMAINS = ("cells", "leaves")

# kernel radius is drawn uniformly from 1..max, per domain
_KERNEL_RADIUS_MAX = {"cells": 4, "leaves": 6}

DEFAULT_FIELD_AMPLITUDE = 512.0
DEFAULT_FIELD_SIGMA = 38.0


def derive_seed(base: int, *key: int) -> int:
    """Mix a base seed with index keys into an independent 64-bit seed."""
    ss = np.random.SeedSequence([int(base)] + [int(k) for k in key])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class CorruptionParams:
    """Full recipe for one corruption; two identical recipes give identical output."""

    op: str = "identity"
    kernel_radius: int = 0
    field_amplitude: float = DEFAULT_FIELD_AMPLITUDE
    field_sigma: float = DEFAULT_FIELD_SIGMA
    seed: int = 0

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown morphological op {self.op!r}")
        if self.op != "identity" and self.kernel_radius < 1:
            raise ValueError("kernel_radius must be >= 1 for a non-identity op")
        if self.field_sigma <= 0:
            raise ValueError("field_sigma must be positive")
        if self.field_amplitude < 0:
            raise ValueError("field_amplitude must be non-negative")


@dataclass(frozen=True)
class CorruptedPair:
    corrupted: np.ndarray
    params: CorruptionParams
    true_q: float
    measure: str


def sample_params(rng_seed: int, domain: str = "cells") -> CorruptionParams:
    """Draw corruption parameters: op uniform over the five states, then the
    kernel radius (uniform 1..4 for cells, 1..6 for leaves) when morphology
    applies, then a fresh seed for the displacement field."""
    if domain not in DOMAINS:
        raise ValueError(f"unknown domain {domain!r}, expected one of {DOMAINS}")
    rng = np.random.default_rng(rng_seed)
    op = OPS[int(rng.integers(len(OPS)))]
    radius = 0
    if op != "identity":
        radius = int(rng.integers(1, _KERNEL_RADIUS_MAX[domain] + 1))
    field_seed = int(rng.integers(0, 2**64, dtype=np.uint64))
    return CorruptionParams(op=op, kernel_radius=radius, seed=field_seed)


def sample_coverage_params(rng_seed: int, domain: str = "cells") -> CorruptionParams:
    """Like ``sample_params`` but with the field amplitude drawn uniformly
    from [0, 512] instead of pinned to 512.

    A full-strength field displaces every pixel by a few px no matter the
    seed, which bounds the quality of small instances away from 1; no batch
    drawn with ``sample_params`` alone can span the whole score range on one
    ground truth. Varying the amplitude restores the high end (amplitude 0 is
    the identity warp) while keeping every draw inside the same morphology
    and field model, so batches built with this sampler cover [0, 1] and make
    usable regression training sets."""
    if domain not in DOMAINS:
        raise ValueError(f"unknown domain {domain!r}, expected one of {DOMAINS}")
    rng = np.random.default_rng(rng_seed)
    op = OPS[int(rng.integers(len(OPS)))]
    radius = 0
    if op != "identity":
        radius = int(rng.integers(1, _KERNEL_RADIUS_MAX[domain] + 1))
    amplitude = float(rng.uniform(0.0, DEFAULT_FIELD_AMPLITUDE))
    field_seed = int(rng.integers(0, 2**64, dtype=np.uint64))
    return CorruptionParams(op=op, kernel_radius=radius, field_amplitude=amplitude, seed=field_seed)


def disc_element(radius: int) -> np.ndarray:
    """Disc structuring element: all offsets with x^2 + y^2 <= radius^2."""
    r = int(radius)
    y, x = np.ogrid[-r : r + 1, -r : r + 1]
    return (x * x + y * y) <= r * r


def apply_morphology(m, op: str, kernel_radius: int = 0) -> np.ndarray:
    """Apply one morphological op to every instance independently.

    Each instance's binary mask is processed with a disc kernel and the
    results are recomposed in ascending label order, later labels
    overwriting earlier ones where the grown masks collide. Instances can
    therefore vanish (eroded away) or eat into their neighbors. Everything
    outside the image counts as background.
    """
    m = check_instance_map(m)
    if op not in OPS:
        raise ValueError(f"unknown morphological op {op!r}")
    if op == "identity":
        return m.copy()
    if kernel_radius < 1:
        raise ValueError("kernel_radius must be >= 1 for a non-identity op")

    selem = disc_element(kernel_radius)
    h, w = m.shape
    margin = 2 * kernel_radius + 1
    out = np.zeros_like(m)
    for label in instance_labels(m):
        mask = m == label
        rows = np.flatnonzero(mask.any(axis=1))
        cols = np.flatnonzero(mask.any(axis=0))
        r0 = max(0, rows[0] - margin)
        r1 = min(h, rows[-1] + margin + 1)
        c0 = max(0, cols[0] - margin)
        c1 = min(w, cols[-1] + margin + 1)
        sub = mask[r0:r1, c0:c1]
        if op == "erode":
            proc = ndimage.binary_erosion(sub, selem)
        elif op == "dilate":
            proc = ndimage.binary_dilation(sub, selem)
        elif op == "open":
            proc = ndimage.binary_opening(sub, selem)
        else:
            proc = ndimage.binary_closing(sub, selem)
        region = out[r0:r1, c0:c1]
        region[proc] = label
    return out


def sample_smooth_field(width: int, height: int, amplitude: float, sigma: float, seed: int):
    """Random displacement field: i.i.d. uniform noise in [-amplitude, amplitude]
    per component, smoothed with a normalized Gaussian of std ``sigma``
    (truncated at 3 sigma, reflect padding). Returns (vx, vy) arrays of
    shape (height, width); vx displaces columns, vy rows."""
    if width <= 0 or height <= 0:
        raise ValueError("field dimensions must be positive")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    rng = np.random.default_rng(seed)
    vx = rng.uniform(-amplitude, amplitude, size=(height, width))
    vy = rng.uniform(-amplitude, amplitude, size=(height, width))
    vx = ndimage.gaussian_filter(vx, sigma, mode="reflect", truncate=3.0)
    vy = ndimage.gaussian_filter(vy, sigma, mode="reflect", truncate=3.0)
    return vx, vy


def warp_labels(m, field) -> np.ndarray:
    """Backward-warp an instance map by a displacement field.

    Labels are categorical, so sampling is nearest-neighbor:
    out(r, c) = m(round(r + vy), round(c + vx)), background outside.
    """
    m = check_instance_map(m)
    vx, vy = field
    vx = np.asarray(vx, dtype=np.float64)
    vy = np.asarray(vy, dtype=np.float64)
    if vx.shape != m.shape or vy.shape != m.shape:
        raise ValueError(f"field shape {vx.shape} does not match map shape {m.shape}")
    h, w = m.shape
    rows, cols = np.indices(m.shape)
    src_r = np.rint(rows + vy).astype(np.int64)
    src_c = np.rint(cols + vx).astype(np.int64)
    inside = (src_r >= 0) & (src_r < h) & (src_c >= 0) & (src_c < w)
    out = np.zeros_like(m)
    out[inside] = m[src_r[inside], src_c[inside]]
    return out


def corrupt(gt, params: CorruptionParams, measure: str = "seg") -> CorruptedPair:
    """Morph, then warp, then score the result against the pristine input."""
    if measure not in measures.MEASURES:
        raise ValueError(f"unknown measure {measure!r}, expected one of {measures.MEASURES}")
    gt = check_instance_map(gt, "gt map")
    morphed = apply_morphology(gt, params.op, params.kernel_radius)
    h, w = gt.shape
    field = sample_smooth_field(w, h, params.field_amplitude, params.field_sigma, params.seed)
    corrupted = warp_labels(morphed, field)
    true_q = measures.cross_method_score(gt, corrupted, measure)
    return CorruptedPair(corrupted=corrupted, params=params, true_q=true_q, measure=measure)
