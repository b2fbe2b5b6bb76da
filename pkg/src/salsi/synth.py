"""Synthetic salt-dome volumes with exact ground truth.

A volume is layered with horizontal sinusoidal reflectors (varying along the
time axis) except inside an axis-aligned ellipsoid, which is filled with weak
incoherent texture. Gaussian noise is added everywhere. Ground truth is the
band of voxels within ``band_halfwidth`` of the ellipsoid surface (true
Euclidean distance) plus the solid interior.
"""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .volume import BinaryVolume, Volume3D

# slack on the band-membership test so that voxels at distance exactly
# band_halfwidth are not lost to root-finding round-off
DISTANCE_TOL = 1e-9


@dataclass(frozen=True)
class DomeSpec:
    dims: tuple[int, int, int] = (64, 64, 64)
    center: tuple[float, float, float] = (32.0, 32.0, 32.0)
    radii: tuple[float, float, float] = (20.0, 16.0, 16.0)
    band_halfwidth: float = 3.0
    reflector_amplitude: float = 1.0
    reflector_period: float = 8.0
    interior_amplitude: float = 0.2
    noise_sigma: float = 0.1
    seed: int = 0

    def __post_init__(self):
        for name in ("dims", "center", "radii"):
            val = tuple(getattr(self, name))
            if len(val) != 3:
                raise ValueError(f"{name} needs three entries")
            object.__setattr__(self, name, val)
        if min(self.dims) < 1:
            raise ValueError("dims must be positive")
        if min(self.radii) <= 0 or self.band_halfwidth <= 0 or self.reflector_period <= 0:
            raise ValueError("radii, band_halfwidth and reflector_period must be positive")
        if min(self.reflector_amplitude, self.interior_amplitude, self.noise_sigma) < 0:
            raise ValueError("amplitudes and noise_sigma must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        margin = self.band_halfwidth
        for c, r, d in zip(self.center, self.radii, self.dims):
            if c - r - margin < 0 or c + r + margin > d - 1:
                raise ValueError(
                    f"dome (center {self.center}, radii {self.radii}) plus band {margin} "
                    f"does not fit in dims {self.dims}"
                )

    @classmethod
    def from_dict(cls, obj: dict) -> "DomeSpec":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown DomeSpec keys: {sorted(unknown)}")
        return cls(**obj)

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "DomeSpec":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def design_contrast(self) -> float:
        """Expected drop in mean |amplitude| from the layered exterior into the dome
        (noise-free): 2A/pi for a sinusoid minus sqrt(2/pi)*B for N(0, B^2) texture."""
        return 2 * self.reflector_amplitude / np.pi - np.sqrt(2 / np.pi) * self.interior_amplitude


class SynthCase(NamedTuple):
    volume: Volume3D
    gt_boundary: BinaryVolume
    gt_interior: BinaryVolume


def _relative_coords(spec: DomeSpec) -> list[np.ndarray]:
    return [
        (np.arange(d, dtype=np.float64) - c).reshape([-1 if i == ax else 1 for i in range(3)])
        for ax, (d, c) in enumerate(zip(spec.dims, spec.center))
    ]


def ellipsoid_distance(points: np.ndarray, radii, iterations: int = 200) -> np.ndarray:
    """Euclidean distance from each point (..., 3), centred coordinates, to the
    surface of the axis-aligned ellipsoid with semi-axes ``radii``.

    The closest surface point is ``x_i = a_i^2 y_i / (a_i^2 + t)`` for the root
    t of ``G(t) = sum (a_i y_i / (a_i^2 + t))^2 - 1`` on ``(-a_min^2, inf)``.
    The root is bisected in ``s = t + a_min^2 > 0`` so that the shortest axes
    keep an exact denominator. When every coordinate along the shortest
    semi-axes is zero and ``G(-a_min^2) < 1`` the root degenerates to
    ``s = 0`` and the closest point leaves the plane of the other axes.
    """
    a = np.asarray(radii, dtype=np.float64)
    y = np.abs(np.asarray(points, dtype=np.float64))
    # coordinates this small move the distance by less than round-off
    y = np.where(y < 1e-12 * a.max(), 0.0, y)
    a2 = a**2
    amin2 = a2.min()
    gap = a2 - amin2  # exactly 0 on the shortest axes
    on_min = gap == 0
    others = ~on_min

    def G(s):
        return np.sum((a * y / (gap + s[..., None])) ** 2, axis=-1)

    min_zero = np.all(y[..., on_min] == 0, axis=-1)
    if others.any():
        g_deg = np.sum((a[others] * y[..., others] / gap[others]) ** 2, axis=-1)
    else:
        g_deg = np.zeros(y.shape[:-1])
    degenerate = min_zero & (g_deg < 1.0)

    # G(s) < 1 once s >= amin2 + a_max * |y|
    lo = np.zeros(y.shape[:-1])
    hi = amin2 + a.max() * np.linalg.norm(y, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            above = G(mid) > 1.0
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
    s = hi
    with np.errstate(divide="ignore", invalid="ignore"):
        x = a2 * y / (gap + s[..., None])
        d2 = np.sum((x - y) ** 2, axis=-1)

    if degenerate.any():
        yd = y[degenerate]
        xd = np.zeros_like(yd)
        xd[:, others] = a2[others] * yd[:, others] / gap[others]
        rest = 1.0 - np.sum((xd[:, others] / a[others]) ** 2, axis=-1)
        off_plane = np.sqrt(amin2 * np.clip(rest, 0.0, None))
        d2[degenerate] = np.sum((xd[:, others] - yd[:, others]) ** 2, axis=-1) + off_plane**2
    return np.sqrt(d2)


def ground_truth(spec: DomeSpec) -> tuple[BinaryVolume, BinaryVolume]:
    """(boundary band, interior) masks for ``spec``."""
    ym, yn, yk = _relative_coords(spec)
    a = np.asarray(spec.radii, dtype=np.float64)
    rho = np.sqrt((ym / a[0]) ** 2 + (yn / a[1]) ** 2 + (yk / a[2]) ** 2)
    interior = rho <= 1.0
    # Minkowski bound: beyond this scaled-radius margin the distance exceeds the band
    slack = spec.band_halfwidth / a.min() + 1e-6
    candidate = np.abs(rho - 1.0) <= slack
    idx = np.nonzero(candidate)
    pts = np.stack([ym[idx[0], 0, 0], yn[0, idx[1], 0], yk[0, 0, idx[2]]], axis=-1)
    dist = ellipsoid_distance(pts, spec.radii)
    band = np.zeros(spec.dims, dtype=bool)
    band[idx] = dist <= spec.band_halfwidth + DISTANCE_TOL
    return BinaryVolume(band), BinaryVolume(interior)


def generate(spec: DomeSpec | None = None) -> SynthCase:
    """Build the synthetic volume and its masks; bit-identical for a given seed.

    Two Gaussian streams are drawn from a Philox counter-based generator keyed
    by ``seed``, each in C order over (m, n, k): the first is the interior
    texture, the second the additive noise, so sample ``j`` of either stream
    belongs to flat voxel index ``j``.
    """
    spec = spec or DomeSpec()
    boundary, interior = ground_truth(spec)
    m = np.arange(spec.dims[0], dtype=np.float64)
    layers = spec.reflector_amplitude * np.sin(2 * np.pi * m / spec.reflector_period)
    vol = np.broadcast_to(layers[:, None, None], spec.dims).copy()

    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    texture = rng.standard_normal(spec.dims)
    noise = rng.standard_normal(spec.dims)
    inside = interior.bits
    vol[inside] = spec.interior_amplitude * texture[inside]
    vol += spec.noise_sigma * noise
    volume = Volume3D(vol.astype(np.float32), provenance=f"salsi synth seed={spec.seed}")
    return SynthCase(volume, boundary, interior)
