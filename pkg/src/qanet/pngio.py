"""PNG interchange for instance maps and intensity images.

Instance maps travel as single-channel 16-bit PNG where the pixel value is
the instance id (0 = background). Intensity images load from 8/16-bit
grayscale or 8-bit RGB PNG and are normalized by the format's maximum value.
"""

from __future__ import annotations

import os

import numpy as np
from PIL import Image

from .validation import check_instance_map, check_intensity_image


def save_instance_map(path: str | os.PathLike, m) -> None:
    m = check_instance_map(m)
    Image.fromarray(m.astype(np.uint16)).save(path, format="PNG")


def load_instance_map(path: str | os.PathLike) -> np.ndarray:
    with Image.open(path) as im:
        if im.mode not in ("I;16", "I", "L", "P"):
            raise ValueError(f"{path}: expected a single-channel label PNG, got mode {im.mode}")
        arr = np.asarray(im)
    return check_instance_map(arr, name=str(path))


def save_intensity_image(path: str | os.PathLike, img) -> None:
    """Write an intensity image as 16-bit grayscale (or 8-bit RGB) PNG."""
    img = check_intensity_image(img)
    if img.ndim == 2:
        arr = np.round(img.astype(np.float64) * 65535.0).astype(np.uint16)
    else:
        arr = np.round(img.astype(np.float64) * 255.0).astype(np.uint8)
    Image.fromarray(arr).save(path, format="PNG")


def load_intensity_image(path: str | os.PathLike) -> np.ndarray:
    """Load a PNG as floats in [0,1], dividing by the max representable value."""
    with Image.open(path) as im:
        if im.mode == "I;16":
            arr = np.asarray(im, dtype=np.float64) / 65535.0
        elif im.mode == "I":
            arr = np.asarray(im, dtype=np.float64) / 65535.0
        elif im.mode == "L":
            arr = np.asarray(im, dtype=np.float64) / 255.0
        elif im.mode == "RGB":
            arr = np.asarray(im, dtype=np.float64) / 255.0
        else:
            raise ValueError(f"{path}: unsupported PNG mode {im.mode}")
    return check_intensity_image(arr.astype(np.float32), name=str(path))
