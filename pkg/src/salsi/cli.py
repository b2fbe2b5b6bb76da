"""Command-line front end: ``salsi {compute,threshold,evaluate,synth,export-slice}``.

Exit codes: 0 success, 1 unexpected failure, 2 input error, 3 degenerate
data, 4 shape mismatch. Outputs are written to temporary names and renamed
into place only when complete.
"""
from __future__ import annotations

import argparse
import contextlib
import dataclasses
import json
import os
import sys
import tempfile
import time
from pathlib import Path

from .config import MORPHOLOGY_MODES, PipelineConfig
from .evaluation import DegenerateTruthError, ShapeMismatchError, evaluate_report
from .saliency import compute_saliency
from .segmentation import DegenerateHistogramError, segment_with_threshold
from .synth import DomeSpec, generate
from .volume import AXES, BinaryVolume, Volume3D, VolumeFormatError, export_slice, load_volume, save_volume, volume_paths

EXIT_OK, EXIT_OTHER, EXIT_INPUT, EXIT_DEGENERATE, EXIT_SHAPE = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def _echo(**pairs) -> None:
    for k, v in pairs.items():
        print(f"{k}={v}")


def _load(prefix: str) -> Volume3D:
    header, payload = volume_paths(prefix)
    for p in (header, payload):
        if not p.is_file():
            raise InputError(f"input file not found: {p}")
    return load_volume(header, payload)


@contextlib.contextmanager
def _staged(*finals: Path):
    """Yield temp paths; rename them onto ``finals`` only if the block succeeds."""
    temps = []
    try:
        for f in finals:
            f.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(prefix=f".{f.name}.", suffix=".part", dir=f.parent)
            os.close(fd)
            temps.append(Path(tmp))
        yield temps
        for tmp, f in zip(temps, finals):
            os.replace(tmp, f)
        temps = []
    finally:
        for tmp in temps:
            with contextlib.suppress(FileNotFoundError):
                tmp.unlink()


def _save(v: Volume3D, prefix: str) -> tuple[Path, Path]:
    header, payload = volume_paths(prefix)
    with _staged(header, payload) as (th, tp):
        save_volume(v, th, tp)
    return header, payload


def _config(args) -> PipelineConfig:
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    return cfg.replace(
        window=args.window,
        temporal_axis=args.temporal_axis,
        levels=args.levels,
        se_radius=args.se_radius,
        n_thresholds=args.n_thresholds,
        morphology_mode=args.morphology_mode,
        roc_morphology=args.roc_morphology,
    )


def cmd_compute(args) -> int:
    cfg = _config(args)
    v = _load(args.input)
    t0 = time.perf_counter()
    s = compute_saliency(v, cfg, threads=args.threads)
    elapsed = time.perf_counter() - t0
    header, _ = _save(s, args.out)
    _echo(**cfg.to_dict(), threads=args.threads, dims="x".join(map(str, s.dims)),
          output=header, elapsed_s=f"{elapsed:.3f}")
    return EXIT_OK


def cmd_threshold(args) -> int:
    cfg = _config(args)
    s = _load(args.saliency)
    t0 = time.perf_counter()
    b, T = segment_with_threshold(s, cfg)
    elapsed = time.perf_counter() - t0
    header, _ = _save(b.to_volume(provenance=f"salsi threshold T={T}"), args.out)
    _echo(**cfg.to_dict(), threshold=T, true_voxels=b.count(), output=header, elapsed_s=f"{elapsed:.3f}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    s = _load(args.saliency)
    gt = BinaryVolume.from_volume(_load(args.gt))
    out = Path(args.out_dir)
    out.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(dir=out.parent, prefix=f".{out.name}.") as tmp:
        result = evaluate_report(s, gt, cfg, tmp)
        out.mkdir(parents=True, exist_ok=True)
        for name in ("roc.csv", "summary.json"):
            os.replace(Path(tmp) / name, out / name)
    _echo(**cfg.to_dict(), **result, output=out)
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.spec:
        if not Path(args.spec).is_file():
            raise InputError(f"input file not found: {args.spec}")
        spec = DomeSpec.from_file(args.spec)
    else:
        spec = DomeSpec()
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    case = generate(spec)
    vol_h, vol_p = volume_paths(args.out_prefix)
    gt_h, gt_p = volume_paths(f"{args.out_prefix}_gt")
    with _staged(vol_h, vol_p, gt_h, gt_p) as (a, b, c, d):
        save_volume(case.volume, a, b)
        save_volume(case.gt_boundary.to_volume(provenance="salsi synth boundary band"), c, d)
    _echo(seed=spec.seed, dims="x".join(map(str, spec.dims)), volume=vol_h, ground_truth=gt_h,
          boundary_voxels=case.gt_boundary.count())
    return EXIT_OK


def cmd_export_slice(args) -> int:
    v = _load(args.input)
    out = Path(args.out)
    with _staged(out) as (tmp,):
        export_slice(v, args.axis, args.index, tmp)
    _echo(axis=args.axis, index=args.index, output=out)
    return EXIT_OK


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("pipeline config (flags override --config)")
    g.add_argument("--config", help="JSON file with PipelineConfig fields")
    g.add_argument("--window", type=int, help="FFT window edge L (default 8)")
    g.add_argument("--temporal-axis", choices=AXES, help="axis treated as temporal (default inline)")
    g.add_argument("--levels", type=int, help="quantization levels H (default 256)")
    g.add_argument("--se-radius", type=int, help="closing radius in voxels (default 10)")
    g.add_argument("--n-thresholds", type=int, help="ROC sweep size (default 100)")
    g.add_argument("--morphology-mode", choices=MORPHOLOGY_MODES)
    g.add_argument("--roc-morphology", action="store_true", default=None,
                   help="close every ROC threshold before scoring")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="salsi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="saliency volume from a seismic volume")
    p.add_argument("--input", required=True, help="volume prefix (or .json/.raw path)")
    p.add_argument("--out", required=True, help="output volume prefix")
    p.add_argument("--threads", type=int, default=1)
    _add_config_flags(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("threshold", help="Otsu threshold + closing of a saliency volume")
    p.add_argument("--saliency", required=True)
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("evaluate", help="ROC/AUC of a saliency volume against ground truth")
    p.add_argument("--saliency", required=True)
    p.add_argument("--gt", required=True, help="ground-truth mask prefix")
    p.add_argument("--out-dir", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="synthetic dome volume + boundary ground truth")
    p.add_argument("--spec", help="DomeSpec JSON (defaults if omitted)")
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("export-slice", help="write one section as a PGM image")
    p.add_argument("--input", required=True)
    p.add_argument("--axis", choices=AXES, required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_slice)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DegenerateHistogramError, DegenerateTruthError) as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ShapeMismatchError as exc:
        print(f"error: shape mismatch: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (VolumeFormatError, IndexError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
