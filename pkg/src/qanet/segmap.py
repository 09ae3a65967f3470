"""Segmentation data model: instance maps, trinary masks, and conversions.

An instance map assigns every pixel an integer instance id (0 = background).
Its trinary view classifies pixels as background (0), instance interior (1)
or instance boundary (2), where the boundary is the 1-pixel-wide inner rim
of each instance: an instance pixel is boundary iff one of its 4-neighbors
carries a different label. Pixels beyond the image edge count as background,
so instances touching the border are rimmed there too.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .validation import check_binary_mask, check_connectivity, check_instance_map, check_trinary_mask

_STRUCT_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCT_8 = np.ones((3, 3), dtype=bool)


def _first_touch_relabel(labels: np.ndarray) -> np.ndarray:
    """Renumber positive labels 1..N by raster order of first occurrence."""
    flat = labels.ravel()
    ids, first = np.unique(flat, return_index=True)
    keep = ids > 0
    ids, first = ids[keep], first[keep]
    order = np.argsort(first, kind="stable")
    lut = np.zeros(int(labels.max()) + 1, dtype=np.int32)
    lut[ids[order]] = np.arange(1, len(ids) + 1, dtype=np.int32)
    return lut[labels]


def connected_components(mask, connectivity: int = 4) -> np.ndarray:
    """Label the connected components of a binary foreground mask.

    Returns an instance map whose labels run 1..N in raster order of each
    component's first pixel. An all-background mask yields an all-zero map.
    """
    mask = check_binary_mask(mask)
    connectivity = check_connectivity(connectivity)
    structure = _STRUCT_4 if connectivity == 4 else _STRUCT_8
    labels, _ = ndimage.label(mask, structure=structure)
    return _first_touch_relabel(labels.astype(np.int32))


def instance_labels(m: np.ndarray) -> np.ndarray:
    """Sorted array of the positive labels present in an instance map."""
    ids = np.unique(m)
    return ids[ids > 0]


def relabel_sequential(m) -> np.ndarray:
    """Renumber labels to 1..N (ascending by original id), keeping the partition."""
    m = check_instance_map(m)
    ids = instance_labels(m)
    if ids.size == 0:
        return m.copy()
    lut = np.zeros(int(ids[-1]) + 1, dtype=np.int32)
    lut[ids] = np.arange(1, ids.size + 1, dtype=np.int32)
    return lut[m]


def instance_to_trinary(m) -> np.ndarray:
    """Convert an instance map to its trinary {background, interior, boundary} view.

    Boundary pixels are instance pixels with a 4-neighbor of a different label;
    the image edge counts as background.
    """
    m = check_instance_map(m)
    padded = np.pad(m, 1, mode="constant", constant_values=0)
    center = padded[1:-1, 1:-1]
    differs = np.zeros(m.shape, dtype=bool)
    for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        nb = padded[1 + dr : 1 + dr + m.shape[0], 1 + dc : 1 + dc + m.shape[1]]
        differs |= nb != center
    out = np.zeros(m.shape, dtype=np.uint8)
    fg = m > 0
    out[fg] = 1
    out[fg & differs] = 2
    return out


def trinary_to_instances(t, connectivity: int = 4, merge_boundary: bool = True) -> np.ndarray:
    """Recover an instance map from a trinary mask.

    Instances are the connected components of the interior (class 1) pixels.
    With ``merge_boundary`` (the default), boundary (class 2) pixels are then
    claimed by the nearest component via a simultaneous 4-neighbor breadth-first
    expansion through the boundary band; a pixel reached by several components
    in the same wave takes the lowest label. Boundary pixels unreachable from
    any interior pixel stay background, as does everything when the mask has
    no class-1 pixels at all.
    """
    t = check_trinary_mask(t)
    connectivity = check_connectivity(connectivity)
    labels = connected_components(t == 1, connectivity=connectivity)
    if not merge_boundary:
        return labels

    boundary = t == 2
    if not boundary.any() or labels.max() == 0:
        return labels

    labels = labels.copy()
    h, w = labels.shape
    unassigned = boundary.copy()
    big = np.iinfo(np.int32).max
    while True:
        # One BFS wave: each unassigned boundary pixel takes the lowest
        # positive label among its 4-neighbors as of the previous wave.
        cand = np.full((h, w), big, dtype=np.int64)
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nb = np.full((h, w), 0, dtype=np.int64)
            rs_src = slice(max(dr, 0), h + min(dr, 0))
            rs_dst = slice(max(-dr, 0), h + min(-dr, 0))
            cs_src = slice(max(dc, 0), w + min(dc, 0))
            cs_dst = slice(max(-dc, 0), w + min(-dc, 0))
            nb[rs_dst, cs_dst] = labels[rs_src, cs_src]
            np.minimum(cand, np.where(nb > 0, nb, big), out=cand)
        reached = unassigned & (cand < big)
        if not reached.any():
            break
        labels[reached] = cand[reached].astype(np.int32)
        unassigned &= ~reached
        if not unassigned.any():
            break
    return labels
