import numpy as np
import pytest

from qanet.validation import (
    MAX_LABEL,
    check_binary_mask,
    check_connectivity,
    check_instance_map,
    check_intensity_image,
    check_quality_vectors,
    check_trinary_mask,
)


def test_instance_map_accepts_integral_floats():
    m = np.array([[0.0, 1.0], [2.0, 0.0]])
    out = check_instance_map(m)
    assert out.dtype == np.int32
    assert out.tolist() == [[0, 1], [2, 0]]


def test_instance_map_rejects_fractional_values():
    with pytest.raises(ValueError, match="integer"):
        check_instance_map(np.array([[0.5, 1.0], [0.0, 0.0]]))


def test_instance_map_rejects_negative_labels():
    with pytest.raises(ValueError, match="negative"):
        check_instance_map(np.array([[-1, 0], [0, 0]]))


def test_instance_map_rejects_labels_above_max():
    with pytest.raises(ValueError, match="label"):
        check_instance_map(np.array([[MAX_LABEL + 1, 0], [0, 0]]))


def test_instance_map_rejects_wrong_ndim():
    with pytest.raises(ValueError, match="2D"):
        check_instance_map(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError, match="2D"):
        check_instance_map(np.zeros(4))


def test_trinary_mask_rejects_other_values():
    assert check_trinary_mask(np.array([[0, 1], [2, 0]])).dtype == np.uint8
    with pytest.raises(ValueError, match="classes"):
        check_trinary_mask(np.array([[0, 3], [1, 2]]))


def test_binary_mask_treats_nonzero_as_foreground():
    out = check_binary_mask(np.array([[0, 5], [1, 0]]))
    assert out.dtype == np.bool_
    assert out.tolist() == [[False, True], [True, False]]


def test_intensity_image_range_and_shape():
    ok = check_intensity_image(np.full((4, 5), 0.5))
    assert ok.dtype == np.float32 and ok.shape == (4, 5)
    squeezed = check_intensity_image(np.zeros((4, 5, 1)))
    assert squeezed.shape == (4, 5)
    rgb = check_intensity_image(np.zeros((4, 5, 3)))
    assert rgb.shape == (4, 5, 3)
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        check_intensity_image(np.full((2, 2), 1.5))
    with pytest.raises(ValueError, match="finite"):
        check_intensity_image(np.full((2, 2), np.nan))
    with pytest.raises(ValueError, match="channel"):
        check_intensity_image(np.zeros((2, 2, 4)))


def test_connectivity_must_be_4_or_8():
    assert check_connectivity(4) == 4
    assert check_connectivity(8) == 8
    with pytest.raises(ValueError, match="connectivity"):
        check_connectivity(6)


def test_quality_vectors_alignment():
    p, t = check_quality_vectors([0.1, 0.2], np.array([0.3, 0.4]))
    assert p.dtype == np.float64 and t.shape == (2,)
    with pytest.raises(ValueError, match="length"):
        check_quality_vectors([0.1], [0.1, 0.2])
    with pytest.raises(ValueError, match="empty"):
        check_quality_vectors([], [])
    with pytest.raises(ValueError, match="finite"):
        check_quality_vectors([np.inf], [0.0])
