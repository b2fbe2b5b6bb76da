from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

from .volume import AXES

MORPHOLOGY_MODES = ("per-section-2d", "ball-3d")


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable of the saliency / segmentation / evaluation chain.

    Attributes
    ----------
    window : int
        Edge length L of the non-overlapping FFT cubes.
    temporal_axis : str
        Volume axis treated as the "temporal" (frame) direction when the
        spectrum is split into its temporal and spatial parts.
    levels : int
        Number of quantized gray levels H used by Otsu and the ROC sweep.
    se_radius : int
        Radius of the closing disk (or ball), in voxels.
    n_thresholds : int
        Number of uniformly spaced levels in the ROC sweep.
    morphology_mode : str
        ``"per-section-2d"`` closes each inline section with a flat disk;
        ``"ball-3d"`` closes the whole volume with a ball.
    roc_morphology : bool
        Apply closing at every ROC threshold (off: threshold-only ROC).
    """

    window: int = 8
    temporal_axis: str = "inline"
    levels: int = 256
    se_radius: int = 10
    n_thresholds: int = 100
    morphology_mode: str = "per-section-2d"
    roc_morphology: bool = False

    def __post_init__(self):
        if self.window < 2:
            raise ValueError(f"window size must be >= 2, got {self.window}")
        if self.temporal_axis not in AXES:
            raise ValueError(f"temporal_axis must be one of {AXES}, got {self.temporal_axis!r}")
        if self.levels < 2:
            raise ValueError(f"levels must be >= 2, got {self.levels}")
        if self.se_radius < 0:
            raise ValueError(f"se_radius must be >= 0, got {self.se_radius}")
        if self.n_thresholds < 2:
            raise ValueError(f"n_thresholds must be >= 2, got {self.n_thresholds}")
        if self.morphology_mode not in MORPHOLOGY_MODES:
            raise ValueError(f"morphology_mode must be one of {MORPHOLOGY_MODES}")

    @property
    def temporal_axis_index(self) -> int:
        return AXES.index(self.temporal_axis)

    def replace(self, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "PipelineConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "PipelineConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))
