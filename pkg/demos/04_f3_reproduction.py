"""
Running the pipeline on the F3 block
====================================

The Netherlands offshore F3 block is not shipped here. A user with a
headerless float dump of the volume converts it once with ``import_raw``,
stating byte order, element type and memory order explicitly, then runs the
CLI. The published per-inline AUCs (inlines 369, 384, 429, 459) need the
hand-labelled boundary masks, which must be supplied as a second dump of the
same layout.

Usage::

    python3 demos/04_f3_reproduction.py F3.bin M N K ">f4" F [gt.bin] [out_dir]
"""
import subprocess
import sys
from pathlib import Path

import numpy as np

from salsi import BinaryVolume, save_volume
from salsi.volume import import_raw, volume_paths

if len(sys.argv) < 7:
    print(__doc__)
    print("no F3 dump given; nothing to do")
    sys.exit(0)

src, dims, dtype, order = sys.argv[1], tuple(int(x) for x in sys.argv[2:5]), sys.argv[5], sys.argv[6]
gt_src = sys.argv[7] if len(sys.argv) > 7 else None
out_dir = Path(sys.argv[8] if len(sys.argv) > 8 else "f3_output")
out_dir.mkdir(parents=True, exist_ok=True)

v = import_raw(src, dims, dtype, order, provenance=f"F3 block from {src}")
save_volume(v, *volume_paths(out_dir / "f3"))
print("imported", v.dims)

def salsi(*args):
    cmd = [sys.executable, "-m", "salsi.cli", *map(str, args)]
    print("$", " ".join(cmd[2:]))
    subprocess.run(cmd, check=True)

salsi("compute", "--input", out_dir / "f3", "--out", out_dir / "f3_sal", "--threads", 4)
salsi("threshold", "--saliency", out_dir / "f3_sal", "--out", out_dir / "f3_mask")
for k in (369, 384, 429, 459):
    if k < v.dims[2]:
        salsi("export-slice", "--input", out_dir / "f3_mask", "--axis", "inline", "--index", k,
              "--out", out_dir / f"mask_inline{k}.pgm")

if gt_src:
    gt = import_raw(gt_src, dims, dtype, order)
    save_volume(BinaryVolume(gt.data != 0).to_volume(), *volume_paths(out_dir / "f3_gt"))
    salsi("evaluate", "--saliency", out_dir / "f3_sal", "--gt", out_dir / "f3_gt", "--out-dir", out_dir / "roc")
    print((out_dir / "roc" / "summary.json").read_text())

    # The published figures are per inline section; score each one alone
    from salsi import Volume3D, load_volume, roc_sweep

    sal = load_volume(*volume_paths(out_dir / "f3_sal"))
    truth = load_volume(*volume_paths(out_dir / "f3_gt")).data != 0
    aucs = []
    for k in (369, 384, 429, 459):
        if k >= v.dims[2] or not truth[:, :, k].any():
            continue
        sec = Volume3D(sal.data[:, :, k:k + 1])
        aucs.append(roc_sweep(sec, BinaryVolume(truth[:, :, k:k + 1])).auc)
        print(f"inline {k}: AUC {aucs[-1]:.4f}")
    if aucs:
        print(f"mean AUC {np.mean(aucs):.4f}")
