import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import center_surround_loop, direct_dft, naive_dft_loops, weights_loop
from salsi.config import PipelineConfig
from salsi.saliency import (
    CellGrid,
    LocalSpectrum,
    build_energy_grids,
    center_surround,
    compute_local_spectrum,
    compute_saliency,
    decompose_spectrum,
    fuse_and_upsample,
    spectral_energy,
    split_weights,
)
from salsi.volume import Volume3D


# -- compute_local_spectrum ---------------------------------------------------------

def test_constant_window_is_dc_only():
    F = compute_local_spectrum(np.full((4, 4, 4), 2.5)).coefficients
    assert F[0, 0, 0] == pytest.approx(2.5, abs=1e-12)
    rest = F.copy()
    rest[0, 0, 0] = 0
    assert np.abs(rest).max() < 1e-10


def test_impulse_spreads_evenly():
    w = np.zeros((4, 4, 4))
    w[0, 0, 0] = 1.0
    F = compute_local_spectrum(w).coefficients
    assert np.allclose(F, 1 / 64, atol=1e-15)


def test_matches_literal_loop_dft(rng):
    for _ in range(3):
        w = rng.standard_normal((4, 4, 4))
        F = compute_local_spectrum(w).coefficients
        assert np.abs(F - naive_dft_loops(w.tolist())).max() < 1e-6


def test_rejects_non_cube():
    with pytest.raises(ValueError):
        compute_local_spectrum(np.zeros((4, 4, 3)))
    with pytest.raises(ValueError):
        compute_local_spectrum(np.zeros((1, 1, 1)))


# -- decompose_spectrum ----------------------------------------------------------

def test_pure_temporal_and_pure_spatial_weights():
    wt, ws = split_weights(8)
    assert (wt[0, 0, 1], ws[0, 0, 1]) == (1.0, 0.0)
    assert (wt[1, 1, 0], ws[1, 1, 0]) == (0.0, 1.0)
    assert (wt[0, 0, 0], ws[0, 0, 0]) == (0.0, 0.0)


@pytest.mark.parametrize("L", [2, 3, 4, 5, 8])
@pytest.mark.parametrize("axis", [0, 1, 2])
def test_weights_match_loop(L, axis):
    a = split_weights(L, axis)
    b = weights_loop(L, axis)
    assert np.allclose(a[0], b[0], atol=1e-15)
    assert np.allclose(a[1], b[1], atol=1e-15)


def test_weight_identity_off_dc():
    wt, ws = split_weights(8)
    s = wt**2 + ws**2
    assert s[0, 0, 0] == 0
    s[0, 0, 0] = 1
    assert np.allclose(s, 1, atol=1e-15)


def test_weights_use_centered_frequencies():
    # raw index 7 of L=8 is frequency -1: same magnitude as index 1
    wt, ws = split_weights(8)
    assert wt[0, 0, 7] == -1.0
    assert ws[3, 0, 0] == ws[5, 0, 0]


def test_decomposition_conserves_energy(rng):
    c = rng.standard_normal((8, 8, 8)) + 1j * rng.standard_normal((8, 8, 8))
    F = LocalSpectrum(c)
    Ft, Fs = decompose_spectrum(F)
    lhs = spectral_energy(Ft) + spectral_energy(Fs)
    rhs = spectral_energy(F) - abs(c[0, 0, 0]) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_temporal_axis_by_name():
    c = np.zeros((4, 4, 4), dtype=complex)
    c[1, 0, 0] = 1.0
    Ft, Fs = decompose_spectrum(LocalSpectrum(c), "time")
    assert spectral_energy(Ft) == 1.0 and spectral_energy(Fs) == 0.0


# -- spectral_energy --------------------------------------------------------------

def test_energy_of_zero_and_constant():
    assert spectral_energy(compute_local_spectrum(np.zeros((4, 4, 4)))) == 0.0
    assert spectral_energy(compute_local_spectrum(np.full((4, 4, 4), 3.0))) == pytest.approx(9.0, rel=1e-12)


def test_parseval(rng):
    w = rng.standard_normal((8, 8, 8))
    assert spectral_energy(compute_local_spectrum(w)) == pytest.approx(np.sum(w**2) / 512, rel=1e-9)


# -- build_energy_grids ------------------------------------------------------------

def test_zero_volume_grids():
    et, es = build_energy_grids(Volume3D(np.zeros((8, 8, 8))), 4)
    assert et.cell_dims == es.cell_dims == (2, 2, 2)
    assert not et.values.any() and not es.values.any()


def test_constant_volume_has_no_energy():
    et, es = build_energy_grids(Volume3D(np.full((8, 8, 8), 4.0)), 4)
    assert np.abs(et.values).max() < 1e-24 and np.abs(es.values).max() < 1e-24


def test_reflection_padding_against_hand_padded(rng):
    data = rng.standard_normal((9, 8, 8))
    et, es = build_energy_grids(Volume3D(data), 4)
    assert et.cell_dims == (3, 2, 2)
    padded = np.concatenate([data, data[[7, 6, 5]]], axis=0)  # mirror about row 8
    wt, ws = weights_loop(4)
    for i in range(3):
        for j in range(2):
            for k in range(2):
                win = padded[4 * i:4 * i + 4, 4 * j:4 * j + 4, 4 * k:4 * k + 4]
                F = direct_dft(win, 4)
                assert et.values[i, j, k] == pytest.approx(np.sum(np.abs(F * wt) ** 2), rel=1e-9, abs=1e-15)
                assert es.values[i, j, k] == pytest.approx(np.sum(np.abs(F * ws) ** 2), rel=1e-9, abs=1e-15)


def test_energy_grids_are_nonnegative_and_split_total(rng):
    data = rng.standard_normal((16, 12, 20))
    et, es = build_energy_grids(Volume3D(data), 4)
    assert (et.values >= 0).all() and (es.values >= 0).all()
    win = data[4:8, 8:12, 12:16]
    F = compute_local_spectrum(win)
    total = spectral_energy(F) - abs(F.coefficients[0, 0, 0]) ** 2
    assert et.values[1, 2, 3] + es.values[1, 2, 3] == pytest.approx(total, rel=1e-9)


def test_window_larger_than_volume():
    with pytest.raises(ValueError):
        build_energy_grids(Volume3D(np.zeros((3, 3, 3))), 4)
    et, _ = build_energy_grids(Volume3D(np.zeros((5, 2, 2))), 4)
    assert et.cell_dims == (2, 1, 1)


def test_energy_grids_independent_of_threads(rng):
    v = Volume3D(rng.standard_normal((40, 24, 16)))
    a = build_energy_grids(v, 8, threads=1)
    b = build_energy_grids(v, 8, threads=8)
    assert a[0].values.tobytes() == b[0].values.tobytes()
    assert a[1].values.tobytes() == b[1].values.tobytes()


# -- center_surround -------------------------------------------------------------

def grid(values, L=4):
    values = np.asarray(values, dtype=float)
    return CellGrid(values, L, tuple(L * d for d in values.shape))


def test_constant_grid_has_no_contrast():
    assert not center_surround(grid(np.full((3, 4, 5), 2.0))).values.any()


def test_center_spike_hand_enumeration():
    g = np.zeros((3, 3, 3))
    g[1, 1, 1] = 1.0
    out = center_surround(grid(g)).values
    assert out[1, 1, 1] == 1.0
    # a corner cell has 7 in-grid neighbours, one of which is the spike
    assert out[0, 0, 0] == pytest.approx(1 / 7)
    # face-centre cells: 17 neighbours
    assert out[0, 1, 1] == pytest.approx(1 / 17)


def test_center_surround_matches_loop(rng):
    g = rng.random((5, 4, 6))
    assert np.array_equal(center_surround(grid(g)).values, center_surround_loop(g))


def test_single_cell_grid():
    assert center_surround(grid(np.ones((1, 1, 1)))).values[0, 0, 0] == 0.0


# -- fuse_and_upsample -------------------------------------------------------------

def test_equal_maps_give_normalized_map(rng):
    g = grid(rng.random((2, 3, 2)))
    s = fuse_and_upsample(g, g, g.volume_dims).data
    vals = g.values
    expected = (vals - vals.min()) / (vals.max() - vals.min())
    assert np.allclose(s[::4, ::4, ::4], expected, atol=1e-7)


def test_fusion_is_the_average():
    # endpoints pin the normalization to the identity on [0, 1]
    st_ = np.array([0.0, 0.2, 1.0]).reshape(3, 1, 1)
    ss_ = np.array([0.0, 0.6, 1.0]).reshape(3, 1, 1)
    s = fuse_and_upsample(grid(st_), grid(ss_)).data
    assert s[4, 0, 0] == np.float32(0.4)
    assert (s[0, 0, 0], s[8, 0, 0]) == (0.0, 1.0)


def test_constant_fused_map_is_zero():
    g = grid(np.full((2, 2, 2), 3.0))
    assert not fuse_and_upsample(g, g).data.any()


def test_crop_and_dims_mismatch(rng):
    a = CellGrid(rng.random((3, 2, 2)), 4, (9, 8, 8))
    s = fuse_and_upsample(a, a, (9, 8, 8))
    assert s.dims == (9, 8, 8)
    with pytest.raises(ValueError):
        fuse_and_upsample(a, grid(rng.random((2, 2, 2))))


@settings(max_examples=30, deadline=None)
@given(
    st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4)),
    st.integers(2, 5),
    st.integers(0, 2**32 - 1),
)
def test_voxels_inherit_their_cell(cells, L, seed):
    r = np.random.default_rng(seed)
    a, b = r.random(cells), r.random(cells)
    dims = tuple(c * L for c in cells)
    s = fuse_and_upsample(CellGrid(a, L, dims), CellGrid(b, L, dims)).data
    fused = 0.5 * a + 0.5 * b
    lo, hi = fused.min(), fused.max()
    norm = np.zeros_like(fused) if hi == lo else (fused - lo) / (hi - lo)
    for idx in np.ndindex(*cells):
        block = s[idx[0] * L:(idx[0] + 1) * L, idx[1] * L:(idx[1] + 1) * L, idx[2] * L:(idx[2] + 1) * L]
        assert (block == block.flat[0]).all()
        assert block.flat[0] == np.float32(norm[idx])


# -- compute_saliency ------------------------------------------------------------------

def test_constant_volume_zero_saliency():
    s = compute_saliency(Volume3D(np.full((16, 16, 16), 1.5)))
    assert s.dims == (16, 16, 16) and not s.data.any()


def test_saliency_range_and_dims(rng):
    v = Volume3D(rng.standard_normal((20, 17, 9)))
    s = compute_saliency(v, PipelineConfig(window=4))
    assert s.dims == v.dims
    assert s.data.min() == 0.0 and s.data.max() == 1.0


def test_boundary_band_is_more_salient(default_case, default_saliency):
    gt = default_case.gt_boundary.bits
    assert default_saliency.data[gt].mean() > default_saliency.data[~gt].mean()


@pytest.mark.parametrize("alpha", [0.5, 2.0, 10.0])
def test_amplitude_scaling_invariance(default_case, default_saliency, alpha):
    v = default_case.volume
    scaled = v.with_data(alpha * v.data.astype(np.float64))
    assert compute_saliency(scaled).data.tobytes() == default_saliency.data.tobytes()


def test_deterministic_over_threads(default_case, default_saliency):
    assert compute_saliency(default_case.volume, threads=4).data.tobytes() == default_saliency.data.tobytes()
