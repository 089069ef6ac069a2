from __future__ import annotations

import math

import numpy as np
import pytest

from hoginator.core.descriptor import (
    DEFAULT_GEOMETRY,
    HogGeometry,
    WindowDescriptor,
    assemble_descriptor,
    cell_histograms,
    extract_window,
    format_descriptor_line,
    gather_blocks,
    normalize_block,
    normalize_blocks,
    parse_descriptor_line,
)
from hoginator.core.gradient_field import Backend, GradientField, compute_gradients, polarize
from hoginator.errors import GeometryError
from hoginator.utils.image_ops import GrayWindow, save_image


def field_with(mags, angles):
    return GradientField(np.asarray(mags, dtype=np.float64), np.asarray(angles, dtype=np.float64))


def empty_field():
    return field_with(np.zeros((128, 64)), np.zeros((128, 64)))


def test_default_geometry():
    g = DEFAULT_GEOMETRY
    assert (g.cells_x, g.cells_y) == (8, 16)
    assert (g.blocks_x, g.blocks_y) == (7, 15)
    assert g.block_len == 36
    assert g.descriptor_len == 3780
    assert g.interior_shape == (128, 64)


def test_geometry_rejects_other_strides():
    with pytest.raises(GeometryError):
        HogGeometry(block_stride=2)


def test_empty_field_gives_empty_histograms():
    hist = cell_histograms(empty_field())
    assert hist.shape == (16, 8, 9)
    assert not hist.any()


def test_single_pixel_vote():
    mags = np.zeros((128, 64))
    angles = np.zeros((128, 64))
    mags[0, 0] = 5.0
    angles[0, 0] = 90.0
    hist = cell_histograms(field_with(mags, angles))
    assert hist[0, 0, 4] == 5.0
    assert hist.sum() == 5.0


def test_uniform_field_fills_one_bin():
    hist = cell_histograms(field_with(np.ones((128, 64)), np.full((128, 64), 10.0)))
    assert np.all(hist[..., 0] == 64.0)
    assert not hist[..., 1:].any()


@pytest.mark.parametrize("angle, bin_", [(0.0, 0), (19.999, 0), (20.0, 1), (90.0, 4), (179.9, 8), (179.99999, 8)])
def test_bin_edges(angle, bin_):
    mags = np.zeros((128, 64))
    angles = np.zeros((128, 64))
    mags[10, 10] = 1.0
    angles[10, 10] = angle
    hist = cell_histograms(field_with(mags, angles))
    assert hist[1, 1, bin_] == 1.0


def test_histograms_scale_with_magnitude(rng):
    mags = rng.uniform(0, 300, size=(128, 64))
    angles = rng.uniform(0, 180, size=(128, 64))
    base = cell_histograms(field_with(mags, angles))
    for c in (0.5, 3.0):
        np.testing.assert_allclose(cell_histograms(field_with(c * mags, angles)), c * base, rtol=1e-12)


def test_wrong_field_shape():
    with pytest.raises(GeometryError):
        cell_histograms(field_with(np.zeros((64, 64)), np.zeros((64, 64))))


def test_block_layout_and_cell_reuse():
    g = DEFAULT_GEOMETRY
    hist = np.zeros((g.cells_y, g.cells_x, g.bins))
    hist[..., 0] = np.arange(g.cells_y * g.cells_x).reshape(g.cells_y, g.cells_x)
    blocks = gather_blocks(hist)
    assert blocks.shape == (15, 7, 36)
    # first block holds cells (0,0), (0,1), (1,0), (1,1)
    assert blocks[0, 0, ::9].tolist() == [0, 1, 8, 9]
    assert blocks[14, 6, ::9].tolist() == [118, 119, 126, 127]

    counts = np.bincount(blocks[..., ::9].astype(int).ravel(), minlength=128)
    assert counts.sum() == 420
    assert counts[0] == 1 and counts[7] == 1 and counts[127] == 1
    assert counts[1] == 2 and counts[8] == 2
    assert counts[9] == 4


@pytest.mark.parametrize("backend", list(Backend))
def test_normalize_zero_block(backend):
    assert not normalize_block(np.zeros(36), backend, 0.01).any()
    assert not normalize_block(np.zeros(36), backend, 0.0).any()


@pytest.mark.parametrize("backend", list(Backend))
def test_normalize_examples(backend):
    e1 = np.zeros(36)
    e1[0] = 1.0
    out = normalize_block(e1, backend, 0.0)
    assert out[0] == pytest.approx(1.0, abs=1e-6)
    assert not out[1:].any()

    np.testing.assert_allclose(normalize_block(np.ones(36), backend, 0.0), 1 / 6, rtol=1e-6)
    np.testing.assert_allclose(normalize_block(np.ones(36), backend, 0.01), 1 / math.sqrt(36.0001), rtol=1e-6)


def test_normalize_block_rejects_wrong_length():
    with pytest.raises(GeometryError):
        normalize_block(np.ones(35))
    with pytest.raises(ValueError):
        normalize_blocks(np.ones(36), eps=-1.0)


@pytest.mark.parametrize("backend", list(Backend))
def test_normalized_blocks_are_bounded(rng, backend):
    raw = rng.exponential(50.0, size=(1000, 36)) * (rng.random((1000, 36)) < 0.7)
    out = normalize_blocks(raw, backend, 0.01)
    tol = 1e-6 if backend is Backend.HARDWARE else 1e-12
    assert np.all(out >= 0) and np.all(out <= 1)
    assert np.all(np.sqrt(np.sum(np.asarray(out, np.float64) ** 2, axis=-1)) <= 1 + tol)


@pytest.mark.parametrize("backend", list(Backend))
def test_normalization_ignores_scale_without_eps(rng, backend):
    raw = rng.uniform(0.1, 400.0, size=(200, 36))
    base = normalize_blocks(raw, backend, 0.0)
    for c in (0.5, 2.0, 10.0):
        np.testing.assert_allclose(normalize_blocks(c * raw, backend, 0.0), base, atol=1e-5)


@pytest.mark.parametrize("backend", list(Backend))
def test_descriptor_shape_and_range(noise_window, backend):
    d = assemble_descriptor(noise_window, backend)
    assert len(d) == 3780
    assert d.features.dtype == np.float32
    assert np.all(d.features >= 0) and np.all(d.features <= 1)
    norms = np.sqrt(np.sum(d.blocks().astype(np.float64) ** 2, axis=-1))
    assert norms.shape == (15, 7)
    assert np.all(norms <= 1 + 1e-6)


@pytest.mark.parametrize("backend", list(Backend))
def test_flat_window_descriptor_is_zero(flat_window, backend):
    assert not assemble_descriptor(flat_window, backend).features.any()


@pytest.mark.parametrize("name", ["ramp_window", "blocky_window"])
def test_backends_agree_on_smooth_windows(request, name):
    w = request.getfixturevalue(name)
    ref = assemble_descriptor(w, Backend.REFERENCE).features
    hw = assemble_descriptor(w, Backend.HARDWARE).features
    assert np.abs(ref - hw).max() <= 0.01


def test_backends_mostly_agree_on_noisy_windows(synthetic_windows):
    g = DEFAULT_GEOMETRY
    agree = []
    for w, _ in synthetic_windows[:20]:
        grads = compute_gradients(w)
        ref_field = polarize(grads, Backend.REFERENCE)
        hw_field = polarize(grads, Backend.HARDWARE)
        ref_bins = np.minimum(np.floor(ref_field.angles_deg / 20.0), 8)
        hw_bins = np.minimum(np.floor(hw_field.angles_deg / 20.0), 8)
        flipped = (ref_bins != hw_bins) & (ref_field.magnitudes > 0)

        # a pixel only changes bin when its angle sits within CORDIC resolution of an edge
        to_edge = ref_field.angles_deg[flipped] % 20.0
        assert np.all(np.minimum(to_edge, 20.0 - to_edge) <= 0.01)

        touched = flipped.reshape(g.cells_y, g.cell_size, g.cells_x, g.cell_size).any(axis=(1, 3))
        diffs = np.abs(
            assemble_descriptor(w, Backend.REFERENCE).features - assemble_descriptor(w, Backend.HARDWARE).features
        )
        for idx in np.flatnonzero(diffs > 0.01):
            by, bx = divmod(idx // g.block_len, g.blocks_x)
            assert touched[by : by + 2, bx : bx + 2].any()
        agree.append(diffs <= 0.01)
    assert np.mean(np.concatenate(agree)) >= 0.99


def test_extraction_is_deterministic(noise_window):
    a = assemble_descriptor(noise_window, Backend.HARDWARE).features
    b = assemble_descriptor(GrayWindow.from_array(noise_window.pixels.copy()), Backend.HARDWARE).features
    assert a.tobytes() == b.tobytes()


def test_extract_window_from_file(tmp_path, noise_window):
    path = tmp_path / "w.pgm"
    save_image(noise_window, path)
    d = extract_window(path, Backend.HARDWARE)
    np.testing.assert_array_equal(d.features, assemble_descriptor(noise_window, Backend.HARDWARE).features)


def test_descriptor_line_is_exact(noise_window):
    d = assemble_descriptor(noise_window, Backend.HARDWARE)
    line = format_descriptor_line(d)
    assert line.count(",") == 3779
    assert "\n" not in line
    assert parse_descriptor_line(line).features.tobytes() == d.features.tobytes()


def test_window_descriptor_blocks_view():
    d = WindowDescriptor(np.arange(3780, dtype=np.float32))
    assert d.blocks()[0, 1, 0] == 36
    assert d.blocks()[1, 0, 0] == 7 * 36


def test_hardware_normalization_of_tiny_blocks():
    out = normalize_block(np.full(36, 1e-21), Backend.HARDWARE, 0.0)
    np.testing.assert_allclose(out, 1 / 6, rtol=1e-6)
    tiny_eps = normalize_block(np.full(36, 1e-21), Backend.HARDWARE, 0.01)
    np.testing.assert_allclose(tiny_eps, 1e-19, rtol=1e-5)


def test_hardware_normalization_ignores_binary_exponent(rng):
    raw = rng.uniform(0.1, 400.0, size=(50, 36)).astype(np.float32)
    base = normalize_blocks(raw, Backend.HARDWARE, 0.0)
    for k in (-100, -20, 20):
        shifted = np.ldexp(raw, k).astype(np.float32)
        assert normalize_blocks(shifted, Backend.HARDWARE, 0.0).tobytes() == base.tobytes()
