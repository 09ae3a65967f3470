import json
import struct

import numpy as np
import pytest

from gradcheck_util import make_toy_inputs
from qanet.ribcage import (
    Adam,
    ArchConfig,
    QANet,
    load_checkpoint,
    save_checkpoint,
)

TOY = ArchConfig(input_size=8, n_blocks=2, features_per_block=(3, 4), fc_widths=(5,))


def _trained_net(seed=7, steps=3):
    net = QANet(TOY, seed=seed)
    images, segs, q = make_toy_inputs(TOY, seed=seed)
    opt = Adam(net.parameters(), lr=1e-2)
    for _ in range(steps):
        net.zero_grad()
        pred = net.forward(images, segs, train=True)
        net.backward(2.0 * (pred - q) / len(q))
        opt.step()
    return net, images, segs


def test_roundtrip_preserves_inference_exactly(tmp_path):
    net, images, segs = _trained_net()
    path = str(tmp_path / "model.qant")
    save_checkpoint(path, net)
    loaded = load_checkpoint(path)
    assert loaded.cfg == net.cfg
    assert np.array_equal(loaded.infer(images, segs), net.infer(images, segs))


def test_roundtrip_preserves_every_tensor(tmp_path):
    net, _, _ = _trained_net(seed=3)
    path = str(tmp_path / "model.qant")
    save_checkpoint(path, net)
    loaded = load_checkpoint(path)
    for (name_a, a), (name_b, b) in zip(net.tensors(), loaded.tensors()):
        assert name_a == name_b
        np.testing.assert_array_equal(a, b.astype(a.dtype), err_msg=name_a)


def test_running_stats_survive_roundtrip(tmp_path):
    net, _, _ = _trained_net(seed=5)
    stats = {n: a.copy() for n, a in net.tensors() if "run_" in n}
    assert stats, "expected batch-norm running statistics among the tensors"
    assert any(np.abs(a).sum() > 0 for a in stats.values())
    path = str(tmp_path / "model.qant")
    save_checkpoint(path, net)
    loaded = dict(load_checkpoint(path).tensors())
    for name, arr in stats.items():
        np.testing.assert_allclose(loaded[name], arr, rtol=0, atol=1e-7, err_msg=name)


def test_header_is_magic_version_and_json_config(tmp_path):
    net = QANet(TOY, seed=0)
    path = str(tmp_path / "model.qant")
    save_checkpoint(path, net)
    with open(path, "rb") as fh:
        assert fh.read(4) == b"QANT"
        (version,) = struct.unpack("<I", fh.read(4))
        assert version == 1
        (cfg_len,) = struct.unpack("<I", fh.read(4))
        cfg = json.loads(fh.read(cfg_len).decode("utf-8"))
    assert cfg["input_size"] == 8
    assert tuple(cfg["features_per_block"]) == (3, 4)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "model.qant"
    path.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(ValueError, match="bad magic"):
        load_checkpoint(str(path))


def test_unsupported_version_rejected(tmp_path):
    net = QANet(TOY, seed=0)
    path = tmp_path / "model.qant"
    save_checkpoint(str(path), net)
    blob = bytearray(path.read_bytes())
    blob[4:8] = struct.pack("<I", 99)
    path.write_bytes(bytes(blob))
    with pytest.raises(ValueError, match="version"):
        load_checkpoint(str(path))


def test_truncated_tensor_data_rejected(tmp_path):
    net = QANet(TOY, seed=0)
    path = tmp_path / "model.qant"
    save_checkpoint(str(path), net)
    blob = path.read_bytes()
    path.write_bytes(blob[:-5])
    with pytest.raises(ValueError, match="truncated"):
        load_checkpoint(str(path))


def test_trailing_data_rejected(tmp_path):
    net = QANet(TOY, seed=0)
    path = tmp_path / "model.qant"
    save_checkpoint(str(path), net)
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(ValueError, match="trailing"):
        load_checkpoint(str(path))


def test_unknown_config_field_rejected(tmp_path):
    net = QANet(TOY, seed=0)
    path = tmp_path / "model.qant"
    save_checkpoint(str(path), net)
    blob = path.read_bytes()
    (cfg_len,) = struct.unpack("<I", blob[8:12])
    cfg = json.loads(blob[12 : 12 + cfg_len].decode("utf-8"))
    cfg["bogus_knob"] = 1
    new_cfg = json.dumps(cfg).encode("utf-8")
    path.write_bytes(blob[:8] + struct.pack("<I", len(new_cfg)) + new_cfg + blob[12 + cfg_len :])
    with pytest.raises(ValueError, match="unknown architecture config fields"):
        load_checkpoint(str(path))
