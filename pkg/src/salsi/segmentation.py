"""Otsu binarization of a saliency volume followed by morphological closing."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import ndimage

from .config import PipelineConfig
from .volume import BinaryVolume, Volume3D


class DegenerateHistogramError(ValueError):
    """Fewer than two occupied gray levels: no threshold separates anything."""


@dataclass(frozen=True)
class Histogram:
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or counts.size < 2:
            raise ValueError("histogram needs at least two bins")
        if (counts < 0).any():
            raise ValueError("histogram counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def levels(self) -> int:
        return self.counts.size

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.total


def quantize_levels(values: np.ndarray, levels: int) -> np.ndarray:
    """level(x) = min(floor(x * H), H - 1) for x in [0, 1]."""
    if levels < 2:
        raise ValueError("need at least two quantization levels")
    q = np.floor(np.asarray(values, dtype=np.float64) * levels)
    return np.clip(q, 0, levels - 1).astype(np.int32)


def quantize(s: Volume3D, levels: int = 256) -> tuple[np.ndarray, Histogram]:
    """Quantized level volume (int32, same dims) and its histogram."""
    data = s.data
    if data.size and (data.min() < 0 or data.max() > 1):
        raise ValueError("saliency values must lie in [0, 1]")
    q = quantize_levels(data, levels)
    return q, Histogram(np.bincount(q.ravel(), minlength=levels))


def within_class_variance(h: Histogram, T: int) -> Fraction:
    """Exact sigma1^2 * P1 + sigma2^2 * P2 for classes [0, T-1] and [T, H-1].

    Evaluated in integer arithmetic from per-class count, first and second
    moments so that equal objectives compare equal.
    """
    c = [int(x) for x in h.counts]
    n1 = sum(c[:T])
    n2 = sum(c[T:])
    if n1 == 0 or n2 == 0:
        raise ValueError(f"threshold {T} leaves a class empty")
    s1 = sum(i * c[i] for i in range(T))
    s2 = sum(i * c[i] for i in range(T, len(c)))
    q = sum(i * i * c[i] for i in range(len(c)))
    num = q * n1 * n2 - s1 * s1 * n2 - s2 * s2 * n1
    return Fraction(num, n1 * n2 * (n1 + n2))


def otsu_threshold(h: Histogram) -> int:
    """Smallest T minimizing the weighted within-class variance.

    Classes are levels ``[0, T-1]`` and ``[T, H-1]``; only thresholds leaving
    both classes non-empty are considered.
    """
    counts = h.counts
    occupied = np.flatnonzero(counts)
    if occupied.size < 2:
        raise DegenerateHistogramError(
            f"histogram has {occupied.size} occupied level(s); cannot threshold"
        )
    c = [int(x) for x in counts]
    total = sum(c)
    first = sum(i * x for i, x in enumerate(c))
    second = sum(i * i * x for i, x in enumerate(c))
    n1 = s1 = 0
    best_T, best = None, None
    for T in range(1, len(c)):
        n1 += c[T - 1]
        s1 += (T - 1) * c[T - 1]
        if T <= occupied[0] or T > occupied[-1]:
            continue
        n2, s2 = total - n1, first - s1
        value = Fraction(second * n1 * n2 - s1 * s1 * n2 - s2 * s2 * n1, n1 * n2 * total)
        if best is None or value < best:
            best_T, best = T, value
    return best_T


def binarize(q: np.ndarray, T: int) -> BinaryVolume:
    return BinaryVolume(np.asarray(q) >= T)


def disk(radius: int) -> np.ndarray:
    """Flat disk {(di, dj): di^2 + dj^2 <= r^2} as a (2r+1, 2r+1) mask."""
    r = int(radius)
    d = np.arange(-r, r + 1)
    return d[:, None] ** 2 + d[None, :] ** 2 <= r * r


def ball(radius: int) -> np.ndarray:
    r = int(radius)
    d = np.arange(-r, r + 1)
    return d[:, None, None] ** 2 + d[None, :, None] ** 2 + d[None, None, :] ** 2 <= r * r


@dataclass(frozen=True)
class StructuringElement:
    radius: int
    mode: str = "per-section-2d"

    @property
    def mask(self) -> np.ndarray:
        return disk(self.radius) if self.mode == "per-section-2d" else ball(self.radius)


def _dilate_edt(b: np.ndarray, radius: int) -> np.ndarray:
    # Euclidean distance to the nearest foreground voxel <= r  <=>  hit by a
    # radius-r disk/ball centred on that voxel
    if not b.any():
        return np.zeros_like(b)
    if b.all():
        return b.copy()
    d2 = ndimage.distance_transform_edt(~b, return_distances=True) ** 2
    return np.rint(d2) <= radius * radius


def close_array(b: np.ndarray, radius: int) -> np.ndarray:
    """Closing of an n-D boolean array by the radius-``radius`` Euclidean ball.

    The array is treated as embedded in an unbounded background: it is padded
    by ``radius`` zeros, dilated, eroded, then cropped. Unlike closing with a
    hard image border this keeps the operator extensive and idempotent.
    """
    b = np.asarray(b, dtype=bool)
    r = int(radius)
    if r == 0 or not b.any():
        return b.copy()
    padded = np.pad(b, r, mode="constant", constant_values=False)
    dilated = _dilate_edt(padded, r)
    closed = ~_dilate_edt(~dilated, r)
    crop = tuple(slice(r, r + n) for n in b.shape)
    return closed[crop]


def morph_close(b: BinaryVolume, se: StructuringElement) -> BinaryVolume:
    """Closing (dilation then erosion) of a binary volume.

    In ``per-section-2d`` mode every inline section ``bits[:, :, k]`` is closed
    on its own with a flat disk; in ``ball-3d`` mode the volume is closed with
    a ball.
    """
    bits = b.bits
    if se.mode == "ball-3d":
        return BinaryVolume(close_array(bits, se.radius), b.axis_labels)
    if se.mode != "per-section-2d":
        raise ValueError(f"unknown morphology mode {se.mode!r}")
    out = np.empty_like(bits)
    for k in range(bits.shape[2]):
        out[:, :, k] = close_array(bits[:, :, k], se.radius)
    return BinaryVolume(out, b.axis_labels)


def segment_with_threshold(s: Volume3D, cfg: PipelineConfig | None = None) -> tuple[BinaryVolume, int]:
    cfg = cfg or PipelineConfig()
    q, hist = quantize(s, cfg.levels)
    T = otsu_threshold(hist)
    closed = morph_close(binarize(q, T), StructuringElement(cfg.se_radius, cfg.morphology_mode))
    return closed, T


def segment(s: Volume3D, cfg: PipelineConfig | None = None) -> BinaryVolume:
    """quantize -> Otsu threshold -> binarize -> closing."""
    return segment_with_threshold(s, cfg)[0]
