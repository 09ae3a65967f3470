"""CSV manifests tying pair ids to image / segmentation files and scores.

A manifest is a plain CSV with an ``id`` column plus whichever of
``image``, ``eval_seg``, ``gt_seg``, ``true_q``, ``predicted_q`` the
producing stage filled in. Path columns are relative to the manifest's own
directory so a dataset directory can be moved wholesale. The corruption
stage names its segmentation column ``corrupted_seg``; readers accept that
as an alias for ``eval_seg`` since downstream the corrupted map simply is
the segmentation under evaluation.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

PATH_COLUMNS = ("image", "eval_seg", "gt_seg")
SCORE_COLUMNS = ("true_q", "predicted_q")


@dataclass
class ManifestRow:
    id: str
    image: str | None = None
    eval_seg: str | None = None
    gt_seg: str | None = None
    true_q: float | None = None
    predicted_q: float | None = None
    extras: dict = field(default_factory=dict)


def _parse_score(raw: str, column: str, path: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{path}: column {column!r} has non-numeric value {raw!r}") from None
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{path}: {column}={value} outside [0, 1]")
    return value


def read_manifest(path: str) -> list[ManifestRow]:
    """Read a manifest, resolving path columns against the manifest's directory."""
    base = os.path.dirname(os.path.abspath(path))
    rows: list[ManifestRow] = []
    seen: set[str] = set()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "id" not in reader.fieldnames:
            raise ValueError(f"{path}: manifest needs an 'id' column")
        for record in reader:
            rid = (record.get("id") or "").strip()
            if not rid:
                raise ValueError(f"{path}: row with empty id")
            if rid in seen:
                raise ValueError(f"{path}: duplicate id {rid!r}")
            seen.add(rid)
            row = ManifestRow(id=rid)
            for key, raw in record.items():
                if key == "id" or raw is None or raw == "":
                    continue
                name = "eval_seg" if key == "corrupted_seg" else key
                if name in PATH_COLUMNS:
                    setattr(row, name, os.path.join(base, raw))
                elif name in SCORE_COLUMNS:
                    setattr(row, name, _parse_score(raw, name, path))
                else:
                    row.extras[key] = raw
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: manifest has no rows")
    return rows


def require_columns(rows: list[ManifestRow], columns: tuple[str, ...], path: str):
    """Fail fast if any row is missing a column the current command needs."""
    for row in rows:
        for col in columns:
            if getattr(row, col) is None:
                raise ValueError(f"{path}: row {row.id!r} is missing required column {col!r}")


def write_manifest(path: str, rows: list[dict], fieldnames: list[str]):
    """Write rows as CSV. Floats are serialized with repr() so a rerun that
    computes the same values produces a byte-identical file and a reader
    recovers the exact double."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            encoded = {}
            for key, value in row.items():
                if isinstance(value, float):
                    encoded[key] = repr(value)
                elif value is None:
                    encoded[key] = ""
                else:
                    encoded[key] = value
            writer.writerow(encoded)
