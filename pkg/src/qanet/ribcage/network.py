"""Quality regression networks over (image, segmentation) input pairs.

Three variants share the same layer inventory and head:

* ``ribcage``: two convolutional streams (one per input) plus a central
  spine. At every level the spine mixes its own previous state with both
  streams' previous states, so image/segmentation disagreement is visible
  at every scale: s_l = f(conv(s_{l-1}) + conv(r1_{l-1}) + conv(r2_{l-1})),
  r_l = f(conv(r_{l-1})), with f = batch norm then ReLU. The spine starts
  at zero, so the first block has no spine-to-spine convolution.
* ``siamese``: two independent convolutional streams whose final features
  are concatenated before the fully connected head.
* ``naive``: the inputs are concatenated channel-wise up front and pass
  through a single convolutional stream.

All convolutions are 3x3 stride 2 (each block halves the spatial size) and
carry no bias; the batch norm offset plays that role. By default the head
reads only the final spine state; ``head_reads_ribs`` widens it to the
concatenation of both final rib states and the spine. In the default mode
the last block allocates no rib convolutions at all, since their outputs
would feed nothing.

The segmentation input is encoded from the trinary view of an instance map:
``trinary`` one-hot encodes background / interior / boundary into three
channels, ``binary`` collapses to a single foreground channel.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

import numpy as np

from ..segmap import instance_to_trinary
from ..validation import check_instance_map, check_intensity_image
from .layers import BatchNorm2d, Conv2d, Dense, ReLU, out_hw

VARIANTS = ("ribcage", "siamese", "naive")
ENCODINGS = ("trinary", "binary")


@dataclass(frozen=True)
class ArchConfig:
    """Architecture hyperparameters; the default is the small demo scale."""

    variant: str = "ribcage"
    input_size: int = 64
    input_encoding: str = "trinary"
    image_channels: int = 1
    n_blocks: int = 4
    features_per_block: tuple[int, ...] = (8, 16, 32, 32)
    fc_widths: tuple[int, ...] = (64, 32)
    head_reads_ribs: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")
        if self.input_encoding not in ENCODINGS:
            raise ValueError(
                f"unknown encoding {self.input_encoding!r}, expected one of {ENCODINGS}"
            )
        if self.image_channels not in (1, 3):
            raise ValueError("image_channels must be 1 or 3")
        if self.n_blocks < 1:
            raise ValueError("need at least one block")
        if len(self.features_per_block) != self.n_blocks:
            raise ValueError("features_per_block must have one entry per block")
        if any(int(f) < 1 for f in self.features_per_block):
            raise ValueError("feature counts must be positive")
        if any(int(f) < 1 for f in self.fc_widths):
            raise ValueError("fc widths must be positive")
        if self.input_size < 1:
            raise ValueError("input_size must be positive")

    def seg_channels(self) -> int:
        return 3 if self.input_encoding == "trinary" else 1

    def final_hw(self) -> int:
        size = self.input_size
        for _ in range(self.n_blocks):
            size = out_hw(size)
        return size

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["features_per_block"] = list(d["features_per_block"])
        d["fc_widths"] = list(d["fc_widths"])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ArchConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown architecture config fields: {sorted(unknown)}")
        kw = dict(d)
        for key in ("features_per_block", "fc_widths"):
            if key in kw:
                kw[key] = tuple(int(v) for v in kw[key])
        return cls(**kw)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, raw: str) -> "ArchConfig":
        return cls.from_dict(json.loads(raw))


def center_fit(arr: np.ndarray, size: int, fill=0) -> np.ndarray:
    """Center-crop and/or center-pad the two leading dims to (size, size)."""
    for axis in (0, 1):
        extent = arr.shape[axis]
        if extent > size:
            start = (extent - size) // 2
            sl = [slice(None)] * arr.ndim
            sl[axis] = slice(start, start + size)
            arr = arr[tuple(sl)]
    pads = []
    for axis in range(arr.ndim):
        gap = size - arr.shape[axis] if axis < 2 else 0
        pads.append((gap // 2, gap - gap // 2))
    if any(lo or hi for lo, hi in pads):
        arr = np.pad(arr, pads, constant_values=fill)
    return arr


def standardize_image(image, size: int, channels: int) -> np.ndarray:
    """Validate and fit an intensity image to (size, size, channels)."""
    img = check_intensity_image(image)
    have = 1 if img.ndim == 2 else 3
    if have != channels:
        raise ValueError(f"image has {have} channel(s) but the model expects {channels}")
    img = center_fit(img, size, fill=0.0)
    if img.ndim == 2:
        img = img[:, :, None]
    return np.ascontiguousarray(img, dtype=np.float32)


def standardize_seg(instance_map, size: int) -> np.ndarray:
    """Instance map to a (size, size) trinary view, uint8.

    The trinary classes are computed on the full map first, then the result
    is cropped/padded, so pixels keep their interior/boundary role even when
    their context falls outside the crop.
    """
    tri = instance_to_trinary(check_instance_map(instance_map))
    return center_fit(tri, size, fill=0)


def encode_seg_batch(tri: np.ndarray, encoding: str) -> np.ndarray:
    """Encode a (N, S, S) batch of trinary maps as network input channels."""
    if encoding == "trinary":
        out = np.zeros(tri.shape + (3,), dtype=np.float32)
        for cls in range(3):
            out[:, :, :, cls] = tri == cls
        return out
    if encoding == "binary":
        return (tri != 0).astype(np.float32)[:, :, :, None]
    raise ValueError(f"unknown encoding {encoding!r}, expected one of {ENCODINGS}")


class _ConvUnit:
    """Conv + batch norm + ReLU, the shared building stone of all streams."""

    def __init__(self, in_ch, out_ch, rng, name, dtype):
        self.conv = Conv2d(in_ch, out_ch, rng, name + ".conv", bias=False, dtype=dtype)
        self.bn = BatchNorm2d(out_ch, name + ".bn", dtype=dtype)
        self.relu = ReLU()

    def forward(self, x, train):
        return self.relu.forward(self.bn.forward(self.conv.forward(x), train))

    def backward(self, d):
        return self.conv.backward(self.bn.backward(self.relu.backward(d)))

    def layers(self):
        return [self.conv, self.bn]


class _RibCageBlock:
    """One level of the ribcage: two rib units plus the spine mix.

    ``spine_in`` of 0 means there is no previous spine state (first block);
    ``has_ribs`` is false only for a final block whose rib outputs nobody
    would read.
    """

    def __init__(self, in1, in2, spine_in, feat, has_ribs, rng, name, dtype):
        self.rib1 = _ConvUnit(in1, feat, rng, name + ".rib1", dtype) if has_ribs else None
        self.rib2 = _ConvUnit(in2, feat, rng, name + ".rib2", dtype) if has_ribs else None
        self.conv_s1 = Conv2d(in1, feat, rng, name + ".spine.from_rib1", bias=False, dtype=dtype)
        self.conv_s2 = Conv2d(in2, feat, rng, name + ".spine.from_rib2", bias=False, dtype=dtype)
        self.conv_ss = (
            Conv2d(spine_in, feat, rng, name + ".spine.from_spine", bias=False, dtype=dtype)
            if spine_in
            else None
        )
        self.bn = BatchNorm2d(feat, name + ".spine.bn", dtype=dtype)
        self.relu = ReLU()

    def forward(self, a, b, s, train):
        pre = self.conv_s1.forward(a) + self.conv_s2.forward(b)
        if self.conv_ss is not None:
            pre = pre + self.conv_ss.forward(s)
        s_out = self.relu.forward(self.bn.forward(pre, train))
        a_out = self.rib1.forward(a, train) if self.rib1 is not None else None
        b_out = self.rib2.forward(b, train) if self.rib2 is not None else None
        return a_out, b_out, s_out

    def backward(self, da_out, db_out, ds_out):
        dpre = self.bn.backward(self.relu.backward(ds_out))
        da = self.conv_s1.backward(dpre)
        db = self.conv_s2.backward(dpre)
        ds = self.conv_ss.backward(dpre) if self.conv_ss is not None else None
        if self.rib1 is not None:
            da = da + self.rib1.backward(da_out)
            db = db + self.rib2.backward(db_out)
        return da, db, ds

    def layers(self):
        out = []
        if self.rib1 is not None:
            out += self.rib1.layers() + self.rib2.layers()
        out += [self.conv_s1, self.conv_s2]
        if self.conv_ss is not None:
            out.append(self.conv_ss)
        out.append(self.bn)
        return out


class QANet:
    """A quality regression network: (image, encoded seg) batches to scores.

    ``forward`` returns raw regression outputs; ``infer`` clamps them to
    [0, 1], which is the contract for reported scores. The constructor
    consumes the seed's random stream in layer declaration order, which is
    also the checkpoint tensor order.
    """

    def __init__(self, cfg: ArchConfig, seed: int = 0, dtype=np.float32):
        self.cfg = cfg
        self.dtype = dtype
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        feats = cfg.features_per_block
        self.blocks: list = []
        self._layers: list = []

        if cfg.variant == "ribcage":
            in1, in2, spine_in = cfg.image_channels, cfg.seg_channels(), 0
            for i, feat in enumerate(feats):
                last = i == cfg.n_blocks - 1
                has_ribs = cfg.head_reads_ribs or not last
                blk = _RibCageBlock(
                    in1, in2, spine_in, feat, has_ribs, rng, f"block{i + 1}", dtype
                )
                self.blocks.append(blk)
                self._layers += blk.layers()
                spine_in = feat
                if has_ribs:
                    in1 = in2 = feat
            head_mult = 3 if cfg.head_reads_ribs else 1
        elif cfg.variant == "siamese":
            self.stream1 = []
            self.stream2 = []
            c1, c2 = cfg.image_channels, cfg.seg_channels()
            for i, feat in enumerate(feats):
                u1 = _ConvUnit(c1, feat, rng, f"stream1.layer{i + 1}", dtype)
                u2 = _ConvUnit(c2, feat, rng, f"stream2.layer{i + 1}", dtype)
                self.stream1.append(u1)
                self.stream2.append(u2)
                self._layers += u1.layers() + u2.layers()
                c1 = c2 = feat
            head_mult = 2
        else:
            self.stream = []
            c = cfg.image_channels + cfg.seg_channels()
            for i, feat in enumerate(feats):
                unit = _ConvUnit(c, feat, rng, f"stream.layer{i + 1}", dtype)
                self.stream.append(unit)
                self._layers += unit.layers()
                c = feat
            head_mult = 1

        hw = cfg.final_hw()
        head_in = hw * hw * feats[-1] * head_mult
        self.fcs = []
        dim = head_in
        for i, width in enumerate(cfg.fc_widths):
            self.fcs.append(Dense(dim, width, rng, f"fc{i + 1}", dtype=dtype))
            self.fcs.append(ReLU())
            dim = width
        self.fcs.append(Dense(dim, 1, rng, "fc_out", dtype=dtype))
        self._layers += [fc for fc in self.fcs if isinstance(fc, Dense)]
        self._head_parts = None

    # -- data flow ---------------------------------------------------------

    def _check_inputs(self, images, segs):
        cfg = self.cfg
        s = cfg.input_size
        if images.ndim != 4 or images.shape[1:] != (s, s, cfg.image_channels):
            raise ValueError(
                f"images must have shape (N, {s}, {s}, {cfg.image_channels}), got {images.shape}"
            )
        if segs.ndim != 4 or segs.shape[1:] != (s, s, cfg.seg_channels()):
            raise ValueError(
                f"segs must have shape (N, {s}, {s}, {cfg.seg_channels()}), got {segs.shape}"
            )
        if images.shape[0] != segs.shape[0]:
            raise ValueError("images and segs disagree on batch size")

    def forward(self, images, segs, train: bool) -> np.ndarray:
        images = np.ascontiguousarray(images, dtype=self.dtype)
        segs = np.ascontiguousarray(segs, dtype=self.dtype)
        self._check_inputs(images, segs)
        cfg = self.cfg

        if cfg.variant == "ribcage":
            a, b, s = images, segs, None
            for blk in self.blocks:
                a, b, s = blk.forward(a, b, s, train)
            if cfg.head_reads_ribs:
                parts = (a, b, s)
            else:
                parts = (s,)
        elif cfg.variant == "siamese":
            x1, x2 = images, segs
            for u1, u2 in zip(self.stream1, self.stream2):
                x1 = u1.forward(x1, train)
                x2 = u2.forward(x2, train)
            parts = (x1, x2)
        else:
            x = np.concatenate([images, segs], axis=3)
            for unit in self.stream:
                x = unit.forward(x, train)
            parts = (x,)

        self._head_parts = tuple(p.shape for p in parts)
        n = parts[0].shape[0]
        h = np.concatenate([p.reshape(n, -1) for p in parts], axis=1)
        for fc in self.fcs:
            h = fc.forward(h)
        return h[:, 0]

    def backward(self, dpred: np.ndarray):
        """Accumulate parameter gradients for the last train-mode forward."""
        d = np.ascontiguousarray(dpred, dtype=self.dtype)[:, None]
        for fc in reversed(self.fcs):
            d = fc.backward(d)
        shapes = self._head_parts
        n = shapes[0][0]
        sizes = [int(np.prod(shape[1:])) for shape in shapes]
        chunks = np.split(d, np.cumsum(sizes)[:-1], axis=1)
        parts = [c.reshape(shape) for c, shape in zip(chunks, shapes)]
        cfg = self.cfg

        if cfg.variant == "ribcage":
            if cfg.head_reads_ribs:
                da, db, ds = parts
            else:
                da, db, ds = None, None, parts[0]
            for blk in reversed(self.blocks):
                da, db, ds = blk.backward(da, db, ds)
        elif cfg.variant == "siamese":
            d1, d2 = parts
            for u1, u2 in zip(reversed(self.stream1), reversed(self.stream2)):
                d1 = u1.backward(d1)
                d2 = u2.backward(d2)
        else:
            dx = parts[0]
            for unit in reversed(self.stream):
                dx = unit.backward(dx)

    def infer(self, images, segs) -> np.ndarray:
        """Inference-mode scores, clamped to the valid quality range."""
        return np.clip(self.forward(images, segs, train=False), 0.0, 1.0)

    # -- parameter plumbing --------------------------------------------------

    def parameters(self):
        for layer in self._layers:
            yield from layer.params()

    def tensors(self):
        for layer in self._layers:
            yield from layer.tensors()

    def zero_grad(self):
        for _, _, grad in self.parameters():
            grad[...] = 0

    def set_bn_momentum(self, momentum: float):
        for layer in self._layers:
            if isinstance(layer, BatchNorm2d):
                layer.momentum = momentum

    def n_params(self) -> int:
        return sum(value.size for _, value, _ in self.parameters())
