import numpy as np
import pytest

from oracles import oracle_trinary, random_disc_map
from qanet.segmap import (
    connected_components,
    instance_labels,
    instance_to_trinary,
    relabel_sequential,
    trinary_to_instances,
)


def test_connected_components_separates_diagonal_under_4():
    mask = np.array(
        [
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
        ]
    )
    assert connected_components(mask, connectivity=4).max() == 3
    assert connected_components(mask, connectivity=8).max() == 1


def test_connected_components_labels_in_raster_order():
    mask = np.array(
        [
            [0, 0, 1],
            [1, 0, 1],
            [1, 0, 0],
        ]
    )
    out = connected_components(mask, connectivity=4)
    # the top-right component is touched first in raster order
    assert out[0, 2] == 1
    assert out[1, 0] == 2
    assert out.tolist() == [[0, 0, 1], [2, 0, 1], [2, 0, 0]]


def test_connected_components_empty_mask():
    out = connected_components(np.zeros((4, 4), dtype=bool))
    assert out.max() == 0


def test_relabel_sequential_compresses_gaps_keeping_order():
    m = np.array([[0, 7], [3, 7]])
    out = relabel_sequential(m)
    assert out.tolist() == [[0, 2], [1, 2]]


def test_relabel_sequential_preserves_already_sequential():
    m = np.array([[1, 2], [0, 3]], dtype=np.int32)
    assert np.array_equal(relabel_sequential(m), m)


def test_relabel_sequential_empty_map():
    m = np.zeros((3, 3), dtype=np.int32)
    assert np.array_equal(relabel_sequential(m), m)


def test_instance_labels_sorted_positive():
    m = np.array([[5, 0], [2, 5]])
    assert instance_labels(m).tolist() == [2, 5]


def test_trinary_full_canvas_instance_has_border_rim():
    # a 4x4 instance filling the canvas: the 12 perimeter pixels are boundary
    # (the image edge counts as background), the 4 central pixels interior
    m = np.ones((4, 4), dtype=np.int32)
    t = instance_to_trinary(m)
    assert int((t == 2).sum()) == 12
    assert int((t == 1).sum()) == 4
    assert t[1, 1] == 1 and t[0, 0] == 2


def test_trinary_single_pixel_is_boundary():
    m = np.zeros((3, 3), dtype=np.int32)
    m[1, 1] = 1
    t = instance_to_trinary(m)
    assert t[1, 1] == 2
    assert int((t > 0).sum()) == 1


def test_trinary_touching_instances_rimmed_on_both_sides():
    m = np.zeros((4, 6), dtype=np.int32)
    m[:, :3] = 1
    m[:, 3:] = 2
    t = instance_to_trinary(m)
    # the shared vertical edge is boundary in both instances
    assert np.all(t[:, 2] == 2)
    assert np.all(t[:, 3] == 2)


def test_trinary_matches_pixel_oracle():
    rng = np.random.default_rng(42)
    for _ in range(50):
        m = random_disc_map(rng, 16, 16, 4)
        assert np.array_equal(instance_to_trinary(m), oracle_trinary(m))


def _separated_disc_map(rng, h=32, w=32, n=4, rmin=2, rmax=4):
    """Discs with 4-connected interiors, pairwise separated by >= 2 px."""
    m = np.zeros((h, w), dtype=np.int32)
    yy, xx = np.indices((h, w))
    centers = []
    label = 0
    for _ in range(50):
        if label == n:
            break
        cy, cx = rng.uniform(rmax, h - rmax), rng.uniform(rmax, w - rmax)
        r = rng.uniform(rmin, rmax)
        if any((cy - py) ** 2 + (cx - px) ** 2 < (r + pr + 3) ** 2 for py, px, pr in centers):
            continue
        label += 1
        m[(yy - cy) ** 2 + (xx - cx) ** 2 <= r * r] = label
        centers.append((cy, cx, r))
    return m


def _raster_relabel(m):
    """Renumber labels by first raster occurrence, to compare partitions."""
    out = np.zeros_like(m)
    mapping = {}
    for val in m.ravel():
        if val > 0 and val not in mapping:
            mapping[int(val)] = len(mapping) + 1
    for val, new in mapping.items():
        out[m == val] = new
    return out


def test_trinary_roundtrip_on_separated_instances():
    rng = np.random.default_rng(7)
    for _ in range(25):
        m = _separated_disc_map(rng)
        if m.max() == 0:
            continue
        back = trinary_to_instances(instance_to_trinary(m))
        assert np.array_equal(_raster_relabel(back), _raster_relabel(m))


def test_trinary_to_instances_without_boundary_merge():
    m = np.zeros((5, 5), dtype=np.int32)
    m[1:4, 1:4] = 1
    t = instance_to_trinary(m)
    interior_only = trinary_to_instances(t, merge_boundary=False)
    assert int((interior_only > 0).sum()) == 1  # just the center pixel
    merged = trinary_to_instances(t)
    assert np.array_equal(merged > 0, m > 0)


def test_trinary_to_instances_contested_boundary_takes_lowest_label():
    # two interiors one apart; the single boundary column between them is
    # reached by both in the same wave and goes to the lower label
    t = np.array(
        [
            [1, 2, 1],
            [1, 2, 1],
        ],
        dtype=np.uint8,
    )
    out = trinary_to_instances(t)
    assert out[0, 0] == 1 and out[0, 2] == 2
    assert out[0, 1] == 1 and out[1, 1] == 1


def test_trinary_to_instances_unreachable_boundary_stays_background():
    t = np.zeros((4, 4), dtype=np.uint8)
    t[0, 0] = 2  # lone boundary pixel, no interior anywhere
    out = trinary_to_instances(t)
    assert out.max() == 0


def test_trinary_to_instances_no_interior_returns_empty():
    t = np.full((3, 3), 2, dtype=np.uint8)
    assert trinary_to_instances(t).max() == 0


def test_trinary_rejects_bad_classes():
    with pytest.raises(ValueError):
        trinary_to_instances(np.full((2, 2), 3))
