"""Voxelwise detection scoring against a ground-truth boundary band: confusion
counts, ROC by sweeping quantized thresholds, trapezoidal AUC, and the
roc.csv / summary.json report."""
from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .segmentation import StructuringElement, binarize, morph_close, quantize
from .volume import BinaryVolume, Volume3D


class ShapeMismatchError(ValueError):
    pass


class DegenerateTruthError(ValueError):
    """Ground truth is all-positive or all-negative, so one rate is undefined."""


@dataclass(frozen=True)
class ConfusionStats:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def sensitivity(self) -> float:
        return self.tp / (self.tp + self.fn)

    tpr = sensitivity

    @property
    def specificity(self) -> float:
        return self.tn / (self.tn + self.fp)

    @property
    def fallout(self) -> float:
        return 1.0 - self.specificity

    @property
    def fpr(self) -> float:
        # fp / negatives; same value as 1 - specificity without the rounding
        return self.fp / (self.tn + self.fp)


def _check_dims(a, b):
    if a.dims != b.dims:
        raise ShapeMismatchError(f"dims differ: {a.dims} vs {b.dims}")


def confusion(b: BinaryVolume, gt: BinaryVolume) -> ConfusionStats:
    _check_dims(b, gt)
    pred, truth = b.bits, gt.bits
    tp = int(np.count_nonzero(pred & truth))
    fp = int(np.count_nonzero(pred & ~truth))
    fn = int(np.count_nonzero(~pred & truth))
    tn = pred.size - tp - fp - fn
    return ConfusionStats(tp, fp, tn, fn)


@dataclass(frozen=True)
class RocCurve:
    """ROC points ordered from the strictest threshold to the loosest.

    The first point uses threshold ``H`` (nothing detected, (0, 0)) and the
    last uses threshold 0 (everything detected, (1, 1)).
    """

    thresholds: np.ndarray
    tpr: np.ndarray
    fpr: np.ndarray

    @property
    def auc(self) -> float:
        return auc(np.column_stack([self.fpr, self.tpr]))

    def points(self) -> list[tuple[int, float, float]]:
        return [(int(t), float(a), float(b)) for t, a, b in zip(self.thresholds, self.tpr, self.fpr)]

    def optimal_index(self) -> int:
        """Point maximizing TPR - FPR; the strictest threshold wins ties."""
        return int(np.argmax(self.tpr - self.fpr))


def sweep_levels(n_thresholds: int, levels: int) -> np.ndarray:
    """``n`` uniformly spaced integer levels in [1, H-1], descending."""
    if n_thresholds < 2:
        raise ValueError("n_thresholds must be >= 2")
    return np.rint(np.linspace(levels - 1, 1, n_thresholds)).astype(np.int64)


def roc_sweep(
    s: Volume3D,
    gt: BinaryVolume,
    n_thresholds: int = 100,
    levels: int = 256,
    closing: StructuringElement | None = None,
) -> RocCurve:
    """ROC of the rule ``level(s) >= T`` over a uniform sweep of T.

    Without ``closing`` the counts come from per-level histograms of the
    positive and negative voxels (one pass); with it every threshold is
    binarized and closed before scoring.
    """
    _check_dims(s, gt)
    truth = gt.bits
    pos = int(np.count_nonzero(truth))
    neg = truth.size - pos
    if pos == 0 or neg == 0:
        raise DegenerateTruthError("ground truth must contain both positive and negative voxels")
    q, _ = quantize(s, levels)
    sweep = sweep_levels(n_thresholds, levels)
    thresholds = np.concatenate([[levels], sweep, [0]])

    if closing is None:
        pos_hist = np.bincount(q[truth], minlength=levels)
        neg_hist = np.bincount(q[~truth], minlength=levels)
        # tail[T] = number of voxels with level >= T; tail[H] = 0
        pos_tail = np.concatenate([np.cumsum(pos_hist[::-1])[::-1], [0]])
        neg_tail = np.concatenate([np.cumsum(neg_hist[::-1])[::-1], [0]])
        tp = pos_tail[thresholds]
        fp = neg_tail[thresholds]
    else:
        tp = np.empty(thresholds.size, dtype=np.int64)
        fp = np.empty(thresholds.size, dtype=np.int64)
        for i, T in enumerate(thresholds):
            st = confusion(morph_close(binarize(q, T), closing), gt)
            tp[i], fp[i] = st.tp, st.fp
        # closing is extensive, so level-0 still covers everything; level H
        # is empty and closes to empty
    return RocCurve(thresholds, tp / pos, fp / neg)


def auc(points) -> float:
    """Trapezoidal area under (FPR, TPR) points sorted by FPR.

    Parameters
    ----------
    points : array_like, shape (n, 2)
        Columns are (FPR, TPR). Repeated FPR values (vertical steps) are
        allowed; a decreasing FPR is rejected.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ValueError("points must be an (n >= 2, 2) array of (fpr, tpr)")
    x, y = pts[:, 0], pts[:, 1]
    dx = np.diff(x)
    if (dx < 0).any():
        raise ValueError("points must be sorted by FPR")
    return float(np.sum(dx * (y[1:] + y[:-1]) * 0.5))


def write_roc_csv(curve: RocCurve, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["threshold", "tpr", "fpr"])
        for t, tpr, fpr in curve.points():
            w.writerow([t, repr(tpr), repr(fpr)])


def summary(curve: RocCurve) -> dict:
    i = curve.optimal_index()
    return {
        "auc": curve.auc,
        "optimal_threshold": int(curve.thresholds[i]),
        "tpr_at_opt": float(curve.tpr[i]),
        "fpr_at_opt": float(curve.fpr[i]),
    }


def evaluate_report(
    s: Volume3D,
    gt: BinaryVolume,
    cfg: PipelineConfig | None = None,
    out: str | os.PathLike = ".",
) -> dict:
    """Write ``roc.csv`` and ``summary.json`` into directory ``out``; return the summary."""
    cfg = cfg or PipelineConfig()
    closing = StructuringElement(cfg.se_radius, cfg.morphology_mode) if cfg.roc_morphology else None
    curve = roc_sweep(s, gt, cfg.n_thresholds, cfg.levels, closing=closing)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_roc_csv(curve, out / "roc.csv")
    result = summary(curve)
    with open(out / "summary.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(result, fh, indent=2)
        fh.write("\n")
    return result
