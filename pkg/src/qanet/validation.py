"""Input validation helpers for the array formats used across the package.

Three array conventions are shared by every module:

* instance map   -- 2D integer array, 0 is background, positive values are
                    instance ids (ids are arbitrary but must stay below 2**16
                    so maps round-trip through 16-bit PNG).
* trinary mask   -- 2D integer array over {0, 1, 2} for background /
                    foreground / instance boundary.
* intensity image -- float array in [0, 1], shape (H, W) or (H, W, 3).

Validators return a normalized copy-free view where possible (``np.asarray``)
and raise ``ValueError`` with a readable message otherwise, in the spirit of
``sklearn.utils.check_array``.
"""

from __future__ import annotations

import numpy as np

MAX_LABEL = 2**16 - 1


def check_instance_map(m, name: str = "instance map") -> np.ndarray:
    """Validate and return an instance map as a 2D int32 array."""
    m = np.asarray(m)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"{name} must be a non-empty 2D array, got shape {m.shape}")
    if not np.issubdtype(m.dtype, np.integer):
        if np.issubdtype(m.dtype, np.floating) and np.all(m == np.floor(m)):
            m = m.astype(np.int64)
        else:
            raise ValueError(f"{name} must have integer labels")
    if m.min() < 0:
        raise ValueError(f"{name} labels must be non-negative")
    if m.max() > MAX_LABEL:
        raise ValueError(f"{name} labels must be < 2**16 to fit the PNG format")
    return np.ascontiguousarray(m, dtype=np.int32)


def check_trinary_mask(t, name: str = "trinary mask") -> np.ndarray:
    """Validate and return a trinary mask as a 2D uint8 array over {0,1,2}."""
    t = np.asarray(t)
    if t.ndim != 2 or t.size == 0:
        raise ValueError(f"{name} must be a non-empty 2D array, got shape {t.shape}")
    if not np.issubdtype(t.dtype, np.integer):
        raise ValueError(f"{name} must have integer classes")
    if t.min() < 0 or t.max() > 2:
        raise ValueError(f"{name} classes must lie in {{0,1,2}}")
    return np.ascontiguousarray(t, dtype=np.uint8)


def check_binary_mask(mask, name: str = "binary mask") -> np.ndarray:
    """Validate a 2D foreground mask (anything nonzero is foreground)."""
    mask = np.asarray(mask)
    if mask.ndim != 2 or mask.size == 0:
        raise ValueError(f"{name} must be a non-empty 2D array, got shape {mask.shape}")
    return mask != 0


def check_intensity_image(img, name: str = "intensity image") -> np.ndarray:
    """Validate an intensity image: floats in [0,1], shape (H,W) or (H,W,3)."""
    img = np.asarray(img, dtype=np.float32)
    if img.ndim == 3 and img.shape[2] == 1:
        img = img[:, :, 0]
    if img.ndim not in (2, 3) or img.size == 0:
        raise ValueError(f"{name} must be 2D or (H,W,3), got shape {img.shape}")
    if img.ndim == 3 and img.shape[2] != 3:
        raise ValueError(f"{name} must have 1 or 3 channels, got {img.shape[2]}")
    if not np.all(np.isfinite(img)):
        raise ValueError(f"{name} contains non-finite values")
    if img.min() < 0.0 or img.max() > 1.0:
        raise ValueError(f"{name} values must lie in [0, 1]")
    return img


def check_connectivity(connectivity: int) -> int:
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    return connectivity


def check_quality_vectors(pred, truth, name_a: str = "pred", name_b: str = "truth"):
    """Validate two aligned score vectors; both must be finite and non-empty."""
    pred = np.asarray(pred, dtype=np.float64).ravel()
    truth = np.asarray(truth, dtype=np.float64).ravel()
    if pred.size == 0 or truth.size == 0:
        raise ValueError(f"{name_a}/{name_b} must be non-empty")
    if pred.shape != truth.shape:
        raise ValueError(
            f"{name_a} and {name_b} must have equal length "
            f"({pred.size} != {truth.size})"
        )
    if not (np.all(np.isfinite(pred)) and np.all(np.isfinite(truth))):
        raise ValueError(f"{name_a}/{name_b} contain non-finite values")
    return pred, truth
