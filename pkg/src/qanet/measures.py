"""Exact instance-segmentation quality measures and evaluation statistics.

Object-level measures operate on instance maps and treat every positive
label as one object:

* ``seg_measure``: mean over ground-truth objects of IoU with the single
  evaluated object covering strictly more than half of the GT object,
  or 0 when no such object exists. The >0.5 majority rule guarantees at
  most one match per GT object, so no explicit assignment is needed.
* ``best_dice``: mean over evaluated objects of the best Dice score
  against any ground-truth object.

Score-level statistics compare predicted against true quality values:
``mse`` and ``hit_rate_curve`` (fraction of pairs within a tolerance,
swept over a tolerance grid, summarized by the normalized area under
that curve).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .validation import check_instance_map, check_quality_vectors

MEASURES = ("seg", "bd")


def _check_measure(measure: str) -> str:
    measure = str(measure).lower()
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}, expected one of {MEASURES}")
    return measure


def iou(c, c_prime) -> float:
    """Intersection over union of two pixel sets given as boolean masks."""
    c = np.asarray(c, dtype=bool)
    c_prime = np.asarray(c_prime, dtype=bool)
    union = int(np.logical_or(c, c_prime).sum())
    if union == 0:
        raise ValueError("undefined IoU: both pixel sets are empty")
    inter = int(np.logical_and(c, c_prime).sum())
    return inter / union


def dice(c, c_prime) -> float:
    """Dice coefficient 2|c∩c'| / (|c|+|c'|) of two boolean pixel sets."""
    c = np.asarray(c, dtype=bool)
    c_prime = np.asarray(c_prime, dtype=bool)
    total = int(c.sum()) + int(c_prime.sum())
    if total == 0:
        raise ValueError("undefined Dice: both pixel sets are empty")
    inter = int(np.logical_and(c, c_prime).sum())
    return 2.0 * inter / total


def _contingency(gt: np.ndarray, ev: np.ndarray):
    """Sparse (gt label, ev label) -> intersection count, plus per-label areas.

    Single pass over the pixels; avoids the quadratic scan over label pairs.
    """
    if gt.shape != ev.shape:
        raise ValueError(f"instance maps differ in shape: {gt.shape} vs {ev.shape}")
    g = gt.ravel().astype(np.int64)
    e = ev.ravel().astype(np.int64)
    gt_areas = {int(l): int(n) for l, n in zip(*np.unique(g[g > 0], return_counts=True))}
    ev_areas = {int(l): int(n) for l, n in zip(*np.unique(e[e > 0], return_counts=True))}
    both = (g > 0) & (e > 0)
    pairs = {}
    if both.any():
        key = g[both] * (int(e.max()) + 1) + e[both]
        uniq, counts = np.unique(key, return_counts=True)
        base = int(e.max()) + 1
        for k, n in zip(uniq, counts):
            pairs[(int(k) // base, int(k) % base)] = int(n)
    return gt_areas, ev_areas, pairs


def seg_measure(gt, ev) -> float:
    """Mean per-GT-object IoU under the strict majority-overlap matching rule.

    A GT object c matches the evaluated object c' iff |c∩c'| > 0.5·|c|
    (strictly; an exact half overlap does not match). Unmatched GT objects
    score 0. Raises on a ground truth without objects, since the mean over
    zero objects is undefined.
    """
    gt = check_instance_map(gt, "gt map")
    ev = check_instance_map(ev, "evaluated map")
    gt_areas, ev_areas, pairs = _contingency(gt, ev)
    if not gt_areas:
        raise ValueError("SEG undefined for empty ground truth")
    scores = []
    for (gl, el), inter in pairs.items():
        # strict majority in exact integer arithmetic
        if 2 * inter > gt_areas[gl]:
            union = gt_areas[gl] + ev_areas[el] - inter
            scores.append(inter / union)
    # fsum is exactly rounded, so the result cannot depend on label order
    return math.fsum(scores) / len(gt_areas)


def best_dice(gt, ev) -> float:
    """Mean over evaluated objects of their best Dice score against GT objects.

    Returns 0 when the evaluated map has no objects (with a warning: the mean
    over an empty set is undefined and 0 is the pessimistic choice), and 0
    when the GT is empty but the evaluated map is not.
    """
    gt = check_instance_map(gt, "gt map")
    ev = check_instance_map(ev, "evaluated map")
    gt_areas, ev_areas, pairs = _contingency(gt, ev)
    if not ev_areas:
        warnings.warn("best_dice: evaluated map has no objects, returning 0", stacklevel=2)
        return 0.0
    best = {el: 0.0 for el in ev_areas}
    for (gl, el), inter in pairs.items():
        d = 2.0 * inter / (gt_areas[gl] + ev_areas[el])
        if d > best[el]:
            best[el] = d
    return math.fsum(best.values()) / len(best)


def cross_method_score(a, b, measure: str = "seg") -> float:
    """Score map ``b`` against map ``a`` acting as surrogate ground truth."""
    measure = _check_measure(measure)
    return seg_measure(a, b) if measure == "seg" else best_dice(a, b)


def mse(pred, truth) -> float:
    """Mean squared error between two aligned score vectors."""
    pred, truth = check_quality_vectors(pred, truth)
    return float(np.mean((pred - truth) ** 2))


def default_tolerance_grid(n: int = 101) -> np.ndarray:
    """Uniform tolerance grid over [0, 1] (101 points by default)."""
    return np.linspace(0.0, 1.0, n)


@dataclass(frozen=True)
class HitRateCurve:
    """Hit rate per tolerance plus the normalized area under the curve."""

    tolerances: np.ndarray
    rates: np.ndarray
    auc: float


def hit_rate_curve(pred, truth, tolerances=None) -> HitRateCurve:
    """Fraction of pairs with |pred - truth| within each tolerance.

    ``tolerances`` must be strictly ascending within [0,1] and end at 1, so
    the curve always closes at hit rate 1 for in-range scores. The AUC is the
    trapezoidal integral of the rate over the grid divided by the grid span.
    """
    pred, truth = check_quality_vectors(pred, truth)
    for name, v in (("pred", pred), ("truth", truth)):
        if v.min() < 0.0 or v.max() > 1.0:
            raise ValueError(f"{name} values must lie in [0, 1] for hit-rate evaluation")
    if tolerances is None:
        tolerances = default_tolerance_grid()
    tolerances = np.asarray(tolerances, dtype=np.float64).ravel()
    if tolerances.size < 2:
        raise ValueError("need at least two tolerance points")
    if np.any(np.diff(tolerances) <= 0):
        raise ValueError("tolerances must be strictly ascending")
    if tolerances[0] < 0.0 or tolerances[-1] != 1.0:
        raise ValueError("tolerances must lie in [0, 1] and end at 1.0")

    err = np.abs(pred - truth)
    rates = np.mean(err[None, :] <= tolerances[:, None], axis=1)
    auc = float(np.trapezoid(rates, tolerances) / (tolerances[-1] - tolerances[0]))
    return HitRateCurve(tolerances=tolerances, rates=rates, auc=auc)
