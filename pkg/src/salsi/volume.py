"""Grid containers, the sidecar-header volume format, and PGM slice export.

On disk a volume is two files sharing a prefix::

    <name>.json   {"dims": [M, N, K], "dtype": "f32le",
                   "axes": ["time", "crossline", "inline"], "provenance": "..."}
    <name>.raw    M*N*K little-endian float32 values, C order over (m, n, k)

i.e. the time index ``m`` varies slowest and the inline index ``k`` fastest.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

AXES = ("time", "crossline", "inline")
DTYPE_TAG = "f32le"
_DISK_DTYPE = np.dtype("<f4")


class VolumeFormatError(ValueError):
    """Header or payload does not satisfy the volume format."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Volume3D:
    """Dense scalar grid of shape (M, N, K) = (time, crossline, inline).

    ``data`` keeps whatever floating dtype it was built with (float32 after
    :func:`load_volume`); it is made read-only on construction.
    """

    data: np.ndarray
    axis_labels: tuple[str, str, str] = AXES
    sample_interval_ms: float | None = None
    provenance: str = ""

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3:
            raise ValueError(f"volume must be 3-D, got shape {data.shape}")
        if min(data.shape) < 1:
            raise ValueError(f"all dims must be >= 1, got {data.shape}")
        if not np.issubdtype(data.dtype, np.floating):
            data = data.astype(np.float64)
        data = np.array(data, copy=True, order="C")
        if len(self.axis_labels) != 3:
            raise ValueError("axis_labels needs exactly three entries")
        object.__setattr__(self, "data", _freeze(data))
        object.__setattr__(self, "axis_labels", tuple(self.axis_labels))

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(int(d) for d in self.data.shape)

    def with_data(self, data: np.ndarray, provenance: str | None = None) -> "Volume3D":
        """Same metadata, new values."""
        return Volume3D(
            data,
            axis_labels=self.axis_labels,
            sample_interval_ms=self.sample_interval_ms,
            provenance=self.provenance if provenance is None else provenance,
        )


@dataclass(frozen=True)
class BinaryVolume:
    """Boolean grid with the same (M, N, K) layout as :class:`Volume3D`."""

    bits: np.ndarray
    axis_labels: tuple[str, str, str] = field(default=AXES)

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 3 or min(bits.shape) < 1:
            raise ValueError(f"binary volume must be 3-D and non-empty, got {bits.shape}")
        object.__setattr__(self, "bits", _freeze(np.array(bits, dtype=bool, copy=True, order="C")))
        object.__setattr__(self, "axis_labels", tuple(self.axis_labels))

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(int(d) for d in self.bits.shape)

    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def to_volume(self, provenance: str = "") -> Volume3D:
        """0.0/1.0 float32 volume, the on-disk encoding of a mask."""
        return Volume3D(self.bits.astype(np.float32), self.axis_labels, provenance=provenance)

    @classmethod
    def from_volume(cls, v: Volume3D) -> "BinaryVolume":
        return cls(v.data != 0, v.axis_labels)


@dataclass(frozen=True)
class VolumeHeader:
    dims: tuple[int, int, int]
    dtype: str = DTYPE_TAG
    axes: tuple[str, str, str] = AXES
    provenance: str = ""

    def payload_nbytes(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) * _DISK_DTYPE.itemsize

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "dtype": self.dtype,
            "axes": list(self.axes),
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, obj) -> "VolumeHeader":
        if not isinstance(obj, dict):
            raise VolumeFormatError("header must be a JSON object")
        dims = obj.get("dims")
        if (
            not isinstance(dims, list)
            or len(dims) != 3
            or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims)
        ):
            raise VolumeFormatError(f"header 'dims' must be three integers, got {dims!r}")
        if min(dims) < 1:
            raise VolumeFormatError(f"header dims must be >= 1, got {dims}")
        dtype = obj.get("dtype", DTYPE_TAG)
        if dtype != DTYPE_TAG:
            raise VolumeFormatError(f"unsupported dtype tag {dtype!r}; only {DTYPE_TAG!r}")
        axes = obj.get("axes", list(AXES))
        if not isinstance(axes, list) or len(axes) != 3 or not all(isinstance(a, str) for a in axes):
            raise VolumeFormatError(f"header 'axes' must be three strings, got {axes!r}")
        provenance = obj.get("provenance", "")
        if not isinstance(provenance, str):
            raise VolumeFormatError("header 'provenance' must be a string")
        return cls(tuple(dims), dtype, tuple(axes), provenance)


def volume_paths(prefix: str | os.PathLike) -> tuple[Path, Path]:
    """``foo`` or ``foo.json`` or ``foo.raw`` -> (foo.json, foo.raw)."""
    p = Path(prefix)
    if p.suffix in (".json", ".raw"):
        p = p.with_suffix("")
    return p.with_name(p.name + ".json"), p.with_name(p.name + ".raw")


def read_header(header_path: str | os.PathLike) -> VolumeHeader:
    try:
        with open(header_path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise VolumeFormatError(f"malformed header {header_path}: {exc}") from exc
    return VolumeHeader.from_json(obj)


def load_volume(header_path: str | os.PathLike, payload_path: str | os.PathLike) -> Volume3D:
    """Read a header + raw payload pair into a float32 :class:`Volume3D`.

    Raises
    ------
    VolumeFormatError
        Malformed header, payload size not equal to ``prod(dims) * 4``, or a
        non-finite sample (the flat C-order index and (m, n, k) are reported).
    FileNotFoundError
        Either file is missing.
    """
    header = read_header(header_path)
    size = os.path.getsize(payload_path)
    expected = header.payload_nbytes()
    if size != expected:
        raise VolumeFormatError(
            f"payload {payload_path} has {size} bytes, header dims {list(header.dims)} need {expected}"
        )
    flat = np.fromfile(payload_path, dtype=_DISK_DTYPE)
    bad = np.flatnonzero(~np.isfinite(flat))
    if bad.size:
        idx = int(bad[0])
        mnk = tuple(int(i) for i in np.unravel_index(idx, header.dims))
        raise VolumeFormatError(
            f"non-finite value {flat[idx]} at flat index {idx} (m,n,k)={mnk} in {payload_path}"
        )
    data = flat.astype(np.float32).reshape(header.dims)
    return Volume3D(data, header.axes, provenance=header.provenance)


def save_volume(
    v: Volume3D,
    header_path: str | os.PathLike,
    payload_path: str | os.PathLike,
) -> None:
    """Write ``v`` as header JSON + little-endian float32 payload (C order).

    Values are cast to float32; volumes built from float32 data round-trip
    bit-exactly through :func:`load_volume`.
    """
    header = VolumeHeader(v.dims, DTYPE_TAG, tuple(v.axis_labels), v.provenance)
    payload = np.ascontiguousarray(v.data, dtype=_DISK_DTYPE)
    with open(payload_path, "wb") as fh:
        fh.write(payload.tobytes(order="C"))
    with open(header_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(header.to_json(), fh)
        fh.write("\n")


def import_raw(
    path: str | os.PathLike,
    dims: tuple[int, int, int],
    dtype: str,
    order: str,
    axes: tuple[str, str, str] = AXES,
    provenance: str = "",
) -> Volume3D:
    """Load a foreign headerless dump whose layout the caller declares.

    ``dtype`` is a numpy dtype string including byte order (``"<f4"``,
    ``">f4"``, ``"<f8"``...). ``order`` is ``"C"`` (last axis fastest) or
    ``"F"`` (first axis fastest). Nothing is guessed: exports such as the F3
    block do not carry their byte order.
    """
    if order not in ("C", "F"):
        raise ValueError("order must be 'C' or 'F'")
    dt = np.dtype(dtype)
    if dt.itemsize > 1 and not str(dtype).startswith(("<", ">")):
        raise ValueError(f"dtype {dtype!r} must state its byte order explicitly ('<' or '>')")
    n = int(np.prod(dims, dtype=np.int64))
    size = os.path.getsize(path)
    if size != n * dt.itemsize:
        raise VolumeFormatError(f"{path} has {size} bytes, expected {n * dt.itemsize} for dims {dims}")
    flat = np.fromfile(path, dtype=dt)
    if not np.all(np.isfinite(flat)):
        idx = int(np.flatnonzero(~np.isfinite(flat))[0])
        raise VolumeFormatError(f"non-finite value at flat index {idx} in {path}")
    data = flat.reshape(dims, order=order).astype(np.float32)
    return Volume3D(data, axes, provenance=provenance)


def axis_index(axis: str | int) -> int:
    if isinstance(axis, int):
        if axis not in (0, 1, 2):
            raise ValueError(f"axis index must be 0, 1 or 2, got {axis}")
        return axis
    try:
        return AXES.index(axis)
    except ValueError:
        raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}") from None


def slice_to_gray(plane: np.ndarray) -> np.ndarray:
    """Min-max normalise a 2-D array to uint8; a constant plane maps to 128."""
    plane = np.asarray(plane, dtype=np.float64)
    lo, hi = plane.min(), plane.max()
    if hi == lo:
        return np.full(plane.shape, 128, dtype=np.uint8)
    scaled = (plane - lo) / (hi - lo) * 255.0
    # round half up: 0.5*255 = 127.5 -> 128
    return np.floor(scaled + 0.5).clip(0, 255).astype(np.uint8)


def write_pgm(path: str | os.PathLike, gray: np.ndarray) -> None:
    """Binary (P5) PGM, maxval 255; rows of ``gray`` become image rows."""
    gray = np.ascontiguousarray(gray, dtype=np.uint8)
    rows, cols = gray.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(gray.tobytes())


def take_slice(v: Volume3D | BinaryVolume, axis: str | int, index: int) -> np.ndarray:
    ax = axis_index(axis)
    arr = v.data if isinstance(v, Volume3D) else v.bits.astype(np.float32)
    extent = arr.shape[ax]
    if not 0 <= index < extent:
        raise IndexError(f"index {index} outside {AXES[ax]} extent [0, {extent})")
    return np.take(arr, index, axis=ax)


def export_slice(v: Volume3D | BinaryVolume, axis: str | int, index: int, out: str | os.PathLike) -> None:
    """Write one section as a grayscale PGM.

    The remaining two axes keep their order: an inline section (fixed ``k``)
    has time along rows and crossline along columns, as seismic sections are
    usually drawn.
    """
    write_pgm(out, slice_to_gray(take_slice(v, axis, index)))
