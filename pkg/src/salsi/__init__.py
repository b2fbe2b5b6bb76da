"""SalSi: saliency-based seismic attribute for salt dome detection."""
from .config import PipelineConfig
from .evaluation import ConfusionStats, RocCurve, auc, confusion, evaluate_report, roc_sweep
from .saliency import (
    CellGrid,
    LocalSpectrum,
    build_energy_grids,
    center_surround,
    compute_local_spectrum,
    compute_saliency,
    decompose_spectrum,
    fuse_and_upsample,
    saliency_components,
    spectral_energy,
)
from .segmentation import (
    DegenerateHistogramError,
    Histogram,
    StructuringElement,
    binarize,
    morph_close,
    otsu_threshold,
    quantize,
    segment,
)
from .synth import DomeSpec, SynthCase, generate
from .volume import BinaryVolume, Volume3D, export_slice, load_volume, save_volume

__version__ = "0.1.0"
