"""Binary model checkpoints.

Layout: magic ``QANT``, format version (uint32 LE), a uint32 LE length
followed by that many bytes of UTF-8 JSON architecture config, then every
model tensor as raw little-endian float32 in declaration order (weights,
batch-norm affine parameters and running statistics). Declaration order is
fixed by the architecture config, so the header alone determines the layout.
"""

from __future__ import annotations

import struct

import numpy as np

from .network import ArchConfig, QANet

MAGIC = b"QANT"
VERSION = 1


def save_checkpoint(path: str, net: QANet):
    cfg_blob = net.cfg.to_json().encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<I", len(cfg_blob)))
        fh.write(cfg_blob)
        for _, arr in net.tensors():
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def load_checkpoint(path: str) -> QANet:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError(f"{path}: not a model checkpoint (bad magic {magic!r})")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        (cfg_len,) = struct.unpack("<I", fh.read(4))
        cfg_blob = fh.read(cfg_len)
        if len(cfg_blob) != cfg_len:
            raise ValueError(f"{path}: truncated checkpoint header")
        cfg = ArchConfig.from_json(cfg_blob.decode("utf-8"))
        net = QANet(cfg, seed=0)
        for name, arr in net.tensors():
            nbytes = arr.size * 4
            buf = fh.read(nbytes)
            if len(buf) != nbytes:
                raise ValueError(f"{path}: truncated checkpoint at tensor {name!r}")
            arr[...] = np.frombuffer(buf, dtype="<f4").reshape(arr.shape)
        if fh.read(1):
            raise ValueError(f"{path}: trailing data after the last tensor")
    return net
