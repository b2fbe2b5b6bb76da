"""Windowed 3-D FFT center-surround saliency.

The volume is cut into non-overlapping L x L x L cubes. Each cube's spectrum
(forward DFT scaled by 1/L^3) is split into a temporal part, weighted by
``w / |(u, v, w)|``, and a spatial part, weighted by ``|(u, v)| / |(u, v, w)|``,
where ``w`` is the frequency along the temporal axis. The energies of the two
parts form two coarse cell grids; each is turned into a contrast map by the
mean absolute difference to its 3x3x3 neighbours, the two maps are averaged,
and the result is spread back to voxel resolution.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import PipelineConfig
from .volume import AXES, Volume3D, axis_index

SaliencyVolume = Volume3D


@dataclass(frozen=True)
class LocalSpectrum:
    """Normalized DFT coefficients of one L^3 window, raw (unshifted) index order."""

    coefficients: np.ndarray

    @property
    def size(self) -> int:
        return self.coefficients.shape[0]


@dataclass(frozen=True)
class CellGrid:
    """One value per window, plus what is needed to map cells back to voxels."""

    values: np.ndarray
    window: int
    volume_dims: tuple[int, int, int]
    origin: tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        expected = cell_dims(self.volume_dims, self.window)
        if values.shape != expected:
            raise ValueError(
                f"cell grid shape {values.shape} inconsistent with volume {self.volume_dims} and L={self.window}"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "volume_dims", tuple(int(d) for d in self.volume_dims))

    @property
    def cell_dims(self) -> tuple[int, int, int]:
        return self.values.shape

    def with_values(self, values: np.ndarray) -> "CellGrid":
        return CellGrid(values, self.window, self.volume_dims, self.origin)


class SaliencyComponents(NamedTuple):
    temporal_energy: CellGrid
    spatial_energy: CellGrid
    temporal_saliency: CellGrid
    spatial_saliency: CellGrid
    saliency: Volume3D


def cell_dims(dims, window: int) -> tuple[int, int, int]:
    return tuple(-(-int(d) // window) for d in dims)


def centered_frequencies(L: int) -> np.ndarray:
    """Signed integer frequency of each raw DFT index: 0, 1, ..., -L/2, ..., -1."""
    return np.rint(np.fft.fftfreq(L, d=1.0 / L))


def split_weights(L: int, temporal_axis: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Per-coefficient (temporal, spatial) weights for an L^3 spectrum.

    Both weights are 0 at DC, where the defining ratios are 0/0. Everywhere
    else ``wt**2 + ws**2 == 1``.
    """
    f = centered_frequencies(L)
    grids = np.meshgrid(f, f, f, indexing="ij")
    radius = np.sqrt(grids[0] ** 2 + grids[1] ** 2 + grids[2] ** 2)
    w = grids[temporal_axis]
    in_plane = np.sqrt(sum(g**2 for i, g in enumerate(grids) if i != temporal_axis))
    wt = np.zeros_like(radius)
    ws = np.zeros_like(radius)
    nz = radius > 0
    wt[nz] = w[nz] / radius[nz]
    ws[nz] = in_plane[nz] / radius[nz]
    return wt, ws


def compute_local_spectrum(window: np.ndarray) -> LocalSpectrum:
    window = np.asarray(window, dtype=np.float64)
    if window.ndim != 3 or len(set(window.shape)) != 1:
        raise ValueError(f"window must be a cube, got shape {window.shape}")
    L = window.shape[0]
    if L < 2:
        raise ValueError("window size must be >= 2")
    return LocalSpectrum(np.fft.fftn(window) / L**3)


def decompose_spectrum(F: LocalSpectrum, temporal_axis: int | str = 2) -> tuple[LocalSpectrum, LocalSpectrum]:
    wt, ws = split_weights(F.size, axis_index(temporal_axis))
    return LocalSpectrum(F.coefficients * wt), LocalSpectrum(F.coefficients * ws)


def spectral_energy(F: LocalSpectrum) -> float:
    c = F.coefficients
    return float(np.sum(c.real**2 + c.imag**2))


def _pad_to_cells(data: np.ndarray, L: int) -> np.ndarray:
    pads = [(0, c * L - d) for c, d in zip(cell_dims(data.shape, L), data.shape)]
    if not any(p for _, p in pads):
        return data
    return np.pad(data, pads, mode="reflect")


def build_energy_grids(
    v: Volume3D,
    L: int = 8,
    temporal_axis: int | str = "inline",
    threads: int = 1,
) -> tuple[CellGrid, CellGrid]:
    """Temporal and spatial spectral energy of every L^3 window of ``v``.

    Partial windows at the far edges are completed by mirror reflection
    (``numpy.pad(mode="reflect")``). Work is split into one task per layer of
    cells along the first axis; the split does not depend on ``threads``, so
    the output is bit-identical for any worker count.
    """
    if L < 2:
        raise ValueError("window size must be >= 2")
    dims = v.dims
    if all(L > d for d in dims):
        raise ValueError(f"window size {L} exceeds every volume dimension {dims}")
    padded = _pad_to_cells(np.asarray(v.data, dtype=np.float64), L)
    Mc, Nc, Kc = cell_dims(dims, L)
    blocks = padded.reshape(Mc, L, Nc, L, Kc, L).transpose(0, 2, 4, 1, 3, 5)
    wt, ws = split_weights(L, axis_index(temporal_axis))
    wt2, ws2 = wt**2, ws**2
    scale = 1.0 / L**3

    def layer(i: int) -> tuple[np.ndarray, np.ndarray]:
        spec = np.fft.fftn(blocks[i], axes=(2, 3, 4)) * scale
        power = spec.real**2 + spec.imag**2
        return (power * wt2).sum(axis=(2, 3, 4)), (power * ws2).sum(axis=(2, 3, 4))

    if threads > 1 and Mc > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            layers = list(pool.map(layer, range(Mc)))
    else:
        layers = [layer(i) for i in range(Mc)]
    et = np.stack([a for a, _ in layers])
    es = np.stack([b for _, b in layers])
    return CellGrid(et, L, dims), CellGrid(es, L, dims)


NEIGHBOR_OFFSETS = tuple(
    (di, dj, dk)
    for di in (-1, 0, 1)
    for dj in (-1, 0, 1)
    for dk in (-1, 0, 1)
    if (di, dj, dk) != (0, 0, 0)
)


def center_surround(E: CellGrid) -> CellGrid:
    """Mean absolute difference of each cell to its in-grid 3x3x3 neighbours.

    Boundary cells average over fewer neighbours. Offsets are accumulated in
    the fixed lexicographic order of ``NEIGHBOR_OFFSETS``.
    """
    e = E.values
    shape = e.shape
    padded = np.pad(e, 1, mode="constant", constant_values=np.nan)
    total = np.zeros(shape)
    count = np.zeros(shape, dtype=np.int64)
    for di, dj, dk in NEIGHBOR_OFFSETS:
        nb = padded[
            1 + di : 1 + di + shape[0],
            1 + dj : 1 + dj + shape[1],
            1 + dk : 1 + dk + shape[2],
        ]
        inside = ~np.isnan(nb)
        total += np.where(inside, np.abs(e - np.where(inside, nb, 0.0)), 0.0)
        count += inside
    out = np.zeros(shape)
    has = count > 0
    out[has] = total[has] / count[has]
    return E.with_values(out)


def minmax_normalize(x: np.ndarray) -> np.ndarray:
    """Map to [0, 1]; constant input maps to all zeros."""
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros_like(x, dtype=np.float64)
    return (x - lo) / (hi - lo)


def upsample_cells(values: np.ndarray, L: int, target_dims) -> np.ndarray:
    """Piecewise-constant expansion of a cell grid, cropped to ``target_dims``."""
    out = values
    for ax in range(3):
        out = np.repeat(out, L, axis=ax)
    M, N, K = target_dims
    return out[:M, :N, :K]


def fuse_and_upsample(St: CellGrid, Ss: CellGrid, target_dims=None) -> SaliencyVolume:
    if St.cell_dims != Ss.cell_dims or St.window != Ss.window:
        raise ValueError(
            f"cell grids disagree: {St.cell_dims}/L={St.window} vs {Ss.cell_dims}/L={Ss.window}"
        )
    if target_dims is None:
        target_dims = St.volume_dims
    if cell_dims(target_dims, St.window) != St.cell_dims:
        raise ValueError(f"target dims {tuple(target_dims)} do not match cell grid {St.cell_dims}")
    fused = 0.5 * St.values + 0.5 * Ss.values
    # every cell keeps at least one voxel after cropping, so normalizing
    # per cell equals normalizing per voxel
    norm = minmax_normalize(fused).astype(np.float32)
    return Volume3D(upsample_cells(norm, St.window, target_dims), AXES, provenance="salsi saliency")


def saliency_components(v: Volume3D, cfg: PipelineConfig | None = None, threads: int = 1) -> SaliencyComponents:
    """All intermediate grids of :func:`compute_saliency`, for inspection."""
    cfg = cfg or PipelineConfig()
    et, es = build_energy_grids(v, cfg.window, cfg.temporal_axis, threads=threads)
    st, ss = center_surround(et), center_surround(es)
    s = fuse_and_upsample(st, ss, v.dims)
    s = Volume3D(s.data, v.axis_labels, v.sample_interval_ms, provenance="salsi saliency")
    return SaliencyComponents(et, es, st, ss, s)


def compute_saliency(v: Volume3D, cfg: PipelineConfig | None = None, threads: int = 1) -> SaliencyVolume:
    """Saliency of ``v`` as a float32 volume of the same dims, values in [0, 1]."""
    return saliency_components(v, cfg, threads).saliency
