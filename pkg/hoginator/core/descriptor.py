"""HOG window descriptor: cell histograms, block normalization, assembly.

Feature order is block-major (blocks row-major from the top-left), then
cell-major within a block (row-major), then bin-minor (bins 0..8).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import GeometryError
from ..utils.image_ops import CropMode, GrayWindow, load_window
from .approx_math import DEFAULT_CORDIC, F32, CordicConfig, rsqrt_newton
from .gradient_field import Backend, GradientField, compute_gradients, polarize

logger = logging.getLogger(__name__)

FEATURE_ORDER_VERSION = "hog130x66/block-cell-bin/v1"
DEFAULT_EPS = 0.01


@dataclass(frozen=True)
class HogGeometry:
    cell_size: int = 8
    bins: int = 9
    block_cells: int = 2
    block_stride: int = 1
    cells_x: int = 8
    cells_y: int = 16

    def __post_init__(self):
        if self.block_stride != 1:
            raise GeometryError("only a 1-cell block stride is supported")
        if self.cells_x < self.block_cells or self.cells_y < self.block_cells:
            raise GeometryError("cell grid is smaller than one block")

    @property
    def blocks_x(self) -> int:
        return self.cells_x - self.block_cells + 1

    @property
    def blocks_y(self) -> int:
        return self.cells_y - self.block_cells + 1

    @property
    def block_len(self) -> int:
        return self.block_cells * self.block_cells * self.bins

    @property
    def descriptor_len(self) -> int:
        return self.blocks_x * self.blocks_y * self.block_len

    @property
    def bin_width(self) -> float:
        return 180.0 / self.bins

    @property
    def interior_shape(self) -> tuple[int, int]:
        return self.cells_y * self.cell_size, self.cells_x * self.cell_size


DEFAULT_GEOMETRY = HogGeometry()


@dataclass(frozen=True)
class WindowDescriptor:
    features: np.ndarray  # (descriptor_len,) float32

    def __len__(self) -> int:
        return int(self.features.shape[0])

    def blocks(self, geom: HogGeometry = DEFAULT_GEOMETRY) -> np.ndarray:
        return self.features.reshape(geom.blocks_y, geom.blocks_x, geom.block_len)


def cell_histograms(field: GradientField, geom: HogGeometry = DEFAULT_GEOMETRY) -> np.ndarray:
    """Hard-binned, magnitude-weighted histograms, shape (cells_y, cells_x, bins)."""
    if field.magnitudes.shape != geom.interior_shape:
        raise GeometryError(f"gradient field {field.magnitudes.shape} does not match {geom.interior_shape}")

    mag = field.magnitudes
    bins = np.floor(field.angles_deg / mag.dtype.type(geom.bin_width)).astype(np.intp)
    bins = np.clip(bins, 0, geom.bins - 1)

    h, w = geom.interior_shape
    cy = (np.arange(h) // geom.cell_size)[:, None]
    cx = (np.arange(w) // geom.cell_size)[None, :]
    idx = (cy * geom.cells_x + cx) * geom.bins + bins

    hist = np.zeros(geom.cells_y * geom.cells_x * geom.bins, dtype=mag.dtype)
    # unbuffered, in pixel order, in the field's own precision
    np.add.at(hist, idx.ravel(), mag.ravel())
    return hist.reshape(geom.cells_y, geom.cells_x, geom.bins)


def normalize_blocks(blocks: np.ndarray, backend: Backend | str = Backend.REFERENCE, eps: float = DEFAULT_EPS) -> np.ndarray:
    """v / sqrt(|v|^2 + eps^2) along the last axis; a zero divisor yields zeros."""
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    backend = Backend(backend)

    if backend is Backend.HARDWARE:
        v = np.asarray(blocks, dtype=F32)
        e = F32(eps)
        # power-of-two shift putting max(|v|, eps) in [1, 2); squares stay normal
        peak = np.asarray(np.maximum(np.abs(v).max(axis=-1), e))
        scale = np.asarray(np.ldexp(1.0, 1 - np.frexp(peak)[1].astype(np.int64)))
        vs = (v * scale[..., None]).astype(F32)
        es = (np.float64(e) * scale).astype(F32)
        s = np.sum(vs * vs, axis=-1, dtype=F32) + es * es
        r = np.zeros_like(s)
        nz = peak > 0
        r[nz] = rsqrt_newton(s[nz])
        return np.minimum(vs * r[..., None], F32(1))

    v = np.asarray(blocks, dtype=np.float64)
    denom = np.sqrt(np.sum(v * v, axis=-1) + eps * eps)[..., None]
    out = np.zeros_like(v)
    np.divide(v, denom, out=out, where=denom > 0)
    return out


def normalize_block(cells: np.ndarray, backend: Backend | str = Backend.REFERENCE, eps: float = DEFAULT_EPS) -> np.ndarray:
    v = np.asarray(cells).reshape(-1)
    if v.shape[0] != DEFAULT_GEOMETRY.block_len:
        raise GeometryError(f"a block holds {DEFAULT_GEOMETRY.block_len} values, got {v.shape[0]}")
    return normalize_blocks(v, backend, eps)


def gather_blocks(hist: np.ndarray, geom: HogGeometry = DEFAULT_GEOMETRY) -> np.ndarray:
    """Stack each block's cells in row-major order, shape (blocks_y, blocks_x, block_len)."""
    by, bx = geom.blocks_y, geom.blocks_x
    parts = [
        hist[dy : dy + by, dx : dx + bx]
        for dy in range(geom.block_cells)
        for dx in range(geom.block_cells)
    ]
    return np.concatenate(parts, axis=-1)


def assemble_descriptor(
    window: GrayWindow,
    backend: Backend | str = Backend.REFERENCE,
    geom: HogGeometry = DEFAULT_GEOMETRY,
    eps: float = DEFAULT_EPS,
    cordic: CordicConfig = DEFAULT_CORDIC,
) -> WindowDescriptor:
    field = polarize(compute_gradients(window), backend, cordic)
    hist = cell_histograms(field, geom)
    normed = normalize_blocks(gather_blocks(hist, geom), backend, eps)
    features = normed.reshape(-1).astype(F32)
    if features.shape[0] != geom.descriptor_len:
        raise GeometryError(f"descriptor has {features.shape[0]} features, expected {geom.descriptor_len}")
    return WindowDescriptor(features)


def extract_window(
    path: str | Path,
    backend: Backend | str = Backend.REFERENCE,
    crop_mode: CropMode | str = CropMode.EXACT,
    geom: HogGeometry = DEFAULT_GEOMETRY,
    eps: float = DEFAULT_EPS,
) -> WindowDescriptor:
    logger.debug("extracting %s", path)
    return assemble_descriptor(load_window(path, crop_mode), backend, geom, eps)


def format_descriptor_line(desc: WindowDescriptor) -> str:
    return ",".join(np.format_float_positional(v, unique=True, trim="-") for v in desc.features.astype(F32))


def parse_descriptor_line(line: str) -> WindowDescriptor:
    return WindowDescriptor(np.array(line.strip().split(","), dtype=np.float64).astype(F32))
