import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import read_pgm
from salsi.volume import (
    BinaryVolume,
    Volume3D,
    VolumeFormatError,
    export_slice,
    import_raw,
    load_volume,
    save_volume,
    volume_paths,
)


def write_pair(tmp_path, header, payload):
    h, p = tmp_path / "v.json", tmp_path / "v.raw"
    h.write_text(json.dumps(header))
    p.write_bytes(payload)
    return h, p


def test_load_zero_volume(tmp_path):
    h, p = write_pair(tmp_path, {"dims": [2, 2, 2]}, bytes(32))
    v = load_volume(h, p)
    assert v.dims == (2, 2, 2)
    assert v.data.dtype == np.float32
    assert np.array_equal(v.data, np.zeros((2, 2, 2)))


def test_size_mismatch(tmp_path):
    h, p = write_pair(tmp_path, {"dims": [2, 2, 2]}, bytes(28))
    with pytest.raises(VolumeFormatError, match="28 bytes"):
        load_volume(h, p)


@pytest.mark.parametrize(
    "header",
    [
        {"dims": [2, 2]},
        {"dims": [2, 2, "2"]},
        {"dims": [0, 2, 2]},
        {"dims": [2, 2, 2], "dtype": "f64le"},
        {"dims": [2, 2, 2], "axes": ["a", "b"]},
        [2, 2, 2],
    ],
)
def test_malformed_header(tmp_path, header):
    h, p = write_pair(tmp_path, header, bytes(32))
    with pytest.raises(VolumeFormatError):
        load_volume(h, p)


def test_header_not_json(tmp_path):
    h, p = tmp_path / "v.json", tmp_path / "v.raw"
    h.write_text("{dims: oops")
    p.write_bytes(bytes(32))
    with pytest.raises(VolumeFormatError, match="malformed"):
        load_volume(h, p)


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_non_finite_rejected_with_index(tmp_path, bad):
    data = np.zeros((2, 3, 4), dtype="<f4")
    data[1, 2, 3] = bad
    h, p = write_pair(tmp_path, {"dims": [2, 3, 4]}, data.tobytes())
    with pytest.raises(VolumeFormatError, match=r"flat index 23 \(m,n,k\)=\(1, 2, 3\)"):
        load_volume(h, p)


def test_single_voxel_encoding(tmp_path):
    h, p = tmp_path / "one.json", tmp_path / "one.raw"
    save_volume(Volume3D(np.array([[[3.5]]], dtype=np.float32)), h, p)
    assert p.read_bytes() == bytes([0x00, 0x00, 0x60, 0x40])
    hdr = json.loads(h.read_text())
    assert hdr == {"dims": [1, 1, 1], "dtype": "f32le", "axes": ["time", "crossline", "inline"], "provenance": ""}


def test_payload_is_c_order_k_fastest(tmp_path):
    data = np.arange(24, dtype=np.float32).reshape(2, 3, 4)
    h, p = tmp_path / "o.json", tmp_path / "o.raw"
    save_volume(Volume3D(data), h, p)
    flat = np.frombuffer(p.read_bytes(), dtype="<f4")
    assert flat[1] == data[0, 0, 1]
    assert flat[4] == data[0, 1, 0]
    assert flat[12] == data[1, 0, 0]


@pytest.mark.parametrize("shape", [(0, 2, 2), (2, 2), (1, 1, 1, 1)])
def test_bad_dims_rejected_at_construction(shape):
    with pytest.raises(ValueError):
        Volume3D(np.zeros(shape, dtype=np.float32))


def test_volume_is_immutable():
    v = Volume3D(np.zeros((2, 2, 2), dtype=np.float32))
    with pytest.raises(ValueError):
        v.data[0, 0, 0] = 1.0


finite_f32 = st.floats(allow_nan=False, allow_infinity=False, width=32)


@settings(max_examples=40, deadline=None)
@given(
    arrays(
        np.float32,
        st.tuples(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5)),
        elements=finite_f32,
    )
)
def test_round_trip_bit_exact(tmp_path_factory, data):
    d = tmp_path_factory.mktemp("rt")
    v = Volume3D(data, provenance="hyp")
    save_volume(v, d / "a.json", d / "a.raw")
    back = load_volume(d / "a.json", d / "a.raw")
    assert back.dims == v.dims
    assert back.data.tobytes() == data.tobytes()
    assert back.provenance == "hyp"


def test_binary_volume_round_trip(tmp_path):
    bits = np.random.default_rng(1).random((3, 4, 5)) > 0.5
    b = BinaryVolume(bits)
    save_volume(b.to_volume(), tmp_path / "b.json", tmp_path / "b.raw")
    back = BinaryVolume.from_volume(load_volume(tmp_path / "b.json", tmp_path / "b.raw"))
    assert np.array_equal(back.bits, bits)
    assert set(np.unique(load_volume(tmp_path / "b.json", tmp_path / "b.raw").data)) <= {0.0, 1.0}


def test_volume_paths():
    assert volume_paths("a/case1") == volume_paths("a/case1.json") == volume_paths("a/case1.raw")
    h, p = volume_paths("x/y")
    assert (h.name, p.name) == ("y.json", "y.raw")


# -- slices --------------------------------------------------------------------

def test_constant_slice_is_mid_gray(tmp_path):
    v = Volume3D(np.full((4, 5, 6), 7.0, dtype=np.float32))
    export_slice(v, "inline", 2, tmp_path / "c.pgm")
    w, h, pix = read_pgm(tmp_path / "c.pgm")
    assert (w, h) == (5, 4)
    assert (pix == 128).all()


def test_half_value_maps_to_128(tmp_path):
    data = np.zeros((3, 1, 1), dtype=np.float32)
    data[:, 0, 0] = [0.0, 0.5, 1.0]
    export_slice(Volume3D(data), "inline", 0, tmp_path / "h.pgm")
    _, _, pix = read_pgm(tmp_path / "h.pgm")
    assert pix[:, 0].tolist() == [0, 128, 255]


@pytest.mark.parametrize("axis,expected", [("time", (6, 5)), ("crossline", (6, 4)), ("inline", (5, 4))])
def test_slice_dims(tmp_path, axis, expected):
    data = np.random.default_rng(3).standard_normal((4, 5, 6)).astype(np.float32)
    export_slice(Volume3D(data), axis, 1, tmp_path / "s.pgm")
    w, h, pix = read_pgm(tmp_path / "s.pgm")
    assert (w, h) == expected
    assert pix.min() == 0 and pix.max() == 255


def test_slice_index_out_of_range(tmp_path):
    v = Volume3D(np.zeros((2, 2, 2), dtype=np.float32))
    with pytest.raises(IndexError):
        export_slice(v, "inline", 2, tmp_path / "x.pgm")
    with pytest.raises(IndexError):
        export_slice(v, "time", -1, tmp_path / "x.pgm")


# -- foreign raw dumps ----------------------------------------------------------

@pytest.mark.parametrize("dtype", ["<f4", ">f4", ">f8"])
@pytest.mark.parametrize("order", ["C", "F"])
def test_import_raw_declared_layout(tmp_path, dtype, order):
    data = np.random.default_rng(5).standard_normal((3, 4, 5)).astype(np.float32)
    (tmp_path / "dump.bin").write_bytes(data.astype(dtype).tobytes(order=order))
    v = import_raw(tmp_path / "dump.bin", (3, 4, 5), dtype, order)
    assert np.array_equal(v.data, data)


def test_import_raw_requires_explicit_byte_order(tmp_path):
    (tmp_path / "d.bin").write_bytes(bytes(8))
    with pytest.raises(ValueError, match="byte order"):
        import_raw(tmp_path / "d.bin", (1, 1, 2), "f4", "C")
