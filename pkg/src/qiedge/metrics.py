"""Boundary-detection scores: tolerant matching, PR sweeps, ODS/OIS/AP.

Matching is greedy and one-to-one. Predicted edge pixels are visited in
row-major order and each claims the nearest still-unmatched ground-truth
pixel within ``tol`` (Euclidean). Equidistant candidates are ordered
row-major. This is cheaper than optimal bipartite assignment and fully
deterministic, so scores are not comparable to benchmark toolkits that use
assignment solvers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from .imagecore import ImageError

__all__ = [
    "TOLERANCE_FRACTION",
    "MatchTally",
    "PRPoint",
    "EvalReport",
    "default_tolerance",
    "default_thresholds",
    "f_measure",
    "match_edges",
    "pr_curve",
    "dataset_scores",
    "average_precision",
]

TOLERANCE_FRACTION = 0.0075


@dataclass(frozen=True)
class MatchTally:
    tp: int
    fp: int
    fn_: int

    def __add__(self, other: "MatchTally") -> "MatchTally":
        return MatchTally(self.tp + other.tp, self.fp + other.fp, self.fn_ + other.fn_)

    @property
    def precision(self) -> float:
        n = self.tp + self.fp
        return 1.0 if n == 0 else self.tp / n

    @property
    def recall(self) -> float:
        n = self.tp + self.fn_
        return 1.0 if n == 0 else self.tp / n


@dataclass(frozen=True)
class PRPoint:
    threshold: float
    precision: float
    recall: float
    f: float
    tally: MatchTally

    @classmethod
    def from_tally(cls, threshold: float, tally: MatchTally) -> "PRPoint":
        p, r = tally.precision, tally.recall
        return cls(float(threshold), p, r, f_measure(p, r), tally)


@dataclass
class EvalReport:
    """Dataset scores.

    ``ods`` is the best mean per-image F at one shared threshold and ``ois``
    the mean of per-image best F, so ``ois >= ods`` always holds.
    ``f_at_ods`` is the pooled F (tallies summed over images) at the ODS
    threshold; ``ap`` is the area under the pooled PR curve.
    """

    ods: float
    ois: float
    ap: float
    f_at_ods: float
    ods_threshold: float
    dataset_curve: list[PRPoint]
    per_image_curves: list[list[PRPoint]]

    def summary(self) -> dict:
        return {
            "ods": self.ods,
            "ois": self.ois,
            "ap": self.ap,
            "f_measure": self.f_at_ods,
            "ods_threshold": self.ods_threshold,
        }


def f_measure(precision: float, recall: float) -> float:
    s = precision + recall
    return 0.0 if s == 0 else 2.0 * precision * recall / s


def default_tolerance(shape) -> float:
    h, w = shape
    return TOLERANCE_FRACTION * math.hypot(h, w)


def default_thresholds() -> np.ndarray:
    return np.linspace(1.0, 254.0, 99)


def _search_offsets(tol: float) -> np.ndarray:
    r = int(math.floor(tol))
    offs = [
        (dy * dy + dx * dx, dy, dx)
        for dy in range(-r, r + 1)
        for dx in range(-r, r + 1)
        if dy * dy + dx * dx <= tol * tol
    ]
    offs.sort()
    return np.array([(dy, dx) for _, dy, dx in offs], dtype=np.int64).reshape(-1, 2)


@numba.njit(cache=True)
def _greedy_match(pred, gt, offsets):
    h, w = pred.shape
    taken = np.zeros((h, w), dtype=np.bool_)
    tp = 0
    for y in range(h):
        for x in range(w):
            if not pred[y, x]:
                continue
            for n in range(offsets.shape[0]):
                yy = y + offsets[n, 0]
                xx = x + offsets[n, 1]
                if 0 <= yy < h and 0 <= xx < w and gt[yy, xx] and not taken[yy, xx]:
                    taken[yy, xx] = True
                    tp += 1
                    break
    return tp


def _as_mask(a) -> np.ndarray:
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise ImageError(f"edge map must be 2-D, got shape {arr.shape}")
    return arr if arr.dtype == bool else arr != 0


def match_edges(pred, gt, tol: float) -> MatchTally:
    """Greedy tolerant correspondence between two binary edge maps."""
    p = _as_mask(pred)
    g = _as_mask(gt)
    if p.shape != g.shape:
        raise ImageError(f"shape mismatch: {p.shape} vs {g.shape}")
    if tol < 0:
        raise ImageError(f"tolerance must be >= 0, got {tol}")
    n_pred = int(p.sum())
    n_gt = int(g.sum())
    if n_pred == 0 or n_gt == 0:
        tp = 0
    elif tol < 1.0:
        tp = int((p & g).sum())
    else:
        tp = int(_greedy_match(p, g, _search_offsets(tol)))
    return MatchTally(tp, n_pred - tp, n_gt - tp)


def pr_curve(
    soft,
    gt,
    thresholds: Sequence[float] | None = None,
    tol: float | None = None,
    thin: bool = False,
) -> list[PRPoint]:
    """Precision/recall of ``soft >= t`` against ``gt`` for each threshold.

    ``thin`` skeletonizes each binarized map before matching (needs
    scikit-image).
    """
    s = np.asarray(soft, dtype=np.float64)
    g = _as_mask(gt)
    if s.shape != g.shape:
        raise ImageError(f"shape mismatch: {s.shape} vs {g.shape}")
    ts = default_thresholds() if thresholds is None else np.asarray(thresholds, dtype=np.float64)
    if ts.ndim != 1 or np.any(np.diff(ts) <= 0):
        raise ImageError("thresholds must be strictly increasing")
    tol = default_tolerance(s.shape) if tol is None else tol
    if thin:
        from skimage.morphology import thin as _thin

    points = []
    # the binarized set only shrinks as t rises, so equal counts mean equal sets
    cache: dict[int, MatchTally] = {}
    for t in ts:
        pred = s >= t
        if thin:
            pred = _thin(pred)
        key = int(pred.sum())
        tally = cache.get(key)
        if tally is None or thin:
            tally = match_edges(pred, g, tol)
            cache[key] = tally
        points.append(PRPoint.from_tally(t, tally))
    return points


def average_precision(points: Sequence[PRPoint]) -> float:
    """Trapezoidal area under precision(recall).

    Points are sorted by recall, precision is made non-increasing in recall
    (running max from the high-recall end), and the curve is anchored at
    recall 0 with the best attainable precision.
    """
    if not points:
        return 0.0
    rec = np.array([p.recall for p in points])
    prec = np.array([p.precision for p in points])
    order = np.lexsort((-prec, rec))
    rec, prec = rec[order], prec[order]
    prec = np.maximum.accumulate(prec[::-1])[::-1]
    rec = np.concatenate(([0.0], rec))
    prec = np.concatenate(([prec[0]], prec))
    return float(np.sum(np.diff(rec) * (prec[1:] + prec[:-1]) / 2.0))


def dataset_scores(curves: Sequence[Sequence[PRPoint]]) -> EvalReport:
    """Aggregate per-image PR curves that share one threshold grid."""
    if len(curves) == 0:
        raise ImageError("dataset_scores needs at least one image")
    grid = [p.threshold for p in curves[0]]
    if not grid:
        raise ImageError("PR curves must contain at least one threshold")
    for c in curves[1:]:
        if [p.threshold for p in c] != grid:
            raise ImageError("all PR curves must share the same threshold grid")

    f = np.array([[p.f for p in c] for c in curves])
    mean_f = f.mean(axis=0)
    best = int(np.argmax(mean_f))
    ois = float(f.max(axis=1).mean())

    pooled = []
    for j, t in enumerate(grid):
        tally = MatchTally(0, 0, 0)
        for c in curves:
            tally = tally + c[j].tally
        pooled.append(PRPoint.from_tally(t, tally))

    return EvalReport(
        ods=float(mean_f[best]),
        ois=ois,
        ap=average_precision(pooled),
        f_at_ods=pooled[best].f,
        ods_threshold=float(grid[best]),
        dataset_curve=pooled,
        per_image_curves=[list(c) for c in curves],
    )
