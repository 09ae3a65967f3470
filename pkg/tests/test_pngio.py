import numpy as np
import pytest

from qanet.pngio import (
    load_instance_map,
    load_intensity_image,
    save_instance_map,
    save_intensity_image,
)


def test_instance_map_roundtrip_including_max_label(tmp_path):
    m = np.array([[0, 1], [70, 65535]], dtype=np.int32)
    path = str(tmp_path / "m.png")
    save_instance_map(path, m)
    back = load_instance_map(path)
    assert back.dtype == np.int32
    assert np.array_equal(back, m)


def test_instance_map_save_rejects_out_of_range(tmp_path):
    with pytest.raises(ValueError):
        save_instance_map(str(tmp_path / "bad.png"), np.array([[65536]]))


def test_gray_intensity_roundtrip_within_quantization(tmp_path):
    rng = np.random.default_rng(0)
    img = rng.random((9, 7)).astype(np.float32)
    path = str(tmp_path / "img.png")
    save_intensity_image(path, img)
    back = load_intensity_image(path)
    assert back.shape == img.shape and back.dtype == np.float32
    assert np.abs(back - img).max() <= 0.5 / 65535 + 1e-7


def test_rgb_intensity_roundtrip_within_quantization(tmp_path):
    rng = np.random.default_rng(1)
    img = rng.random((5, 6, 3)).astype(np.float32)
    path = str(tmp_path / "img.png")
    save_intensity_image(path, img)
    back = load_intensity_image(path)
    assert back.shape == img.shape
    assert np.abs(back - img).max() <= 0.5 / 255 + 1e-7


def test_load_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        load_instance_map(str(tmp_path / "nope.png"))


def test_loaded_values_lie_in_unit_range(tmp_path):
    img = np.ones((3, 3), dtype=np.float32)
    path = str(tmp_path / "ones.png")
    save_intensity_image(path, img)
    back = load_intensity_image(path)
    assert back.max() == 1.0 and back.min() >= 0.0
