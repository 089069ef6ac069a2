from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import GeometryError, ImageFormatError, InputReadError

logger = logging.getLogger(__name__)

WINDOW_WIDTH = 66
WINDOW_HEIGHT = 130

# Matlab rgb2gray weights
LUMA_WEIGHTS = (0.2989, 0.5870, 0.1140)

_WHITESPACE = b" \t\n\r\v\f"


class CropMode(str, Enum):
    EXACT = "exact"
    CENTER_CROP = "center_crop"


@dataclass(frozen=True)
class RgbImage:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise GeometryError(f"image must be at least 1x1, got {self.width}x{self.height}")
        if self.pixels.shape != (self.height, self.width, 3) or self.pixels.dtype != np.uint8:
            raise GeometryError(f"RGB payload shape {self.pixels.shape} does not match {self.width}x{self.height}x3")


@dataclass(frozen=True)
class GrayImage:
    width: int
    height: int
    pixels: np.ndarray  # (height, width) uint8, f(x, y) = pixels[y, x]

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise GeometryError(f"image must be at least 1x1, got {self.width}x{self.height}")
        if self.pixels.shape != (self.height, self.width) or self.pixels.dtype != np.uint8:
            raise GeometryError(f"gray payload shape {self.pixels.shape} does not match {self.width}x{self.height}")


@dataclass(frozen=True)
class GrayWindow(GrayImage):
    """A gray image of exactly the detection-window size (66 wide, 130 high)."""

    def __post_init__(self):
        super().__post_init__()
        if (self.width, self.height) != (WINDOW_WIDTH, WINDOW_HEIGHT):
            raise GeometryError(f"window must be {WINDOW_WIDTH}x{WINDOW_HEIGHT}, got {self.width}x{self.height}")

    @classmethod
    def from_array(cls, pixels: np.ndarray) -> "GrayWindow":
        arr = np.asarray(pixels)
        if arr.ndim != 2:
            raise GeometryError(f"window must be a 2-D array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            arr = np.clip(arr, 0, 255).astype(np.uint8)
        return cls(arr.shape[1], arr.shape[0], arr)


def _read_header_int(data: bytes, pos: int) -> tuple[int, int, int]:
    """Skip whitespace and comments, then parse one decimal token.

    Returns (value, token_offset, position after the token).
    """
    n = len(data)
    while pos < n:
        c = data[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and 48 <= data[pos] <= 57:
        pos += 1
    if pos == start:
        raise ImageFormatError("malformed header: expected a decimal number", start)
    return int(data[start:pos]), start, pos


def decode_pnm(data: bytes) -> RgbImage | GrayImage:
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise ImageFormatError(f"malformed header: unsupported magic {magic!r}", 0)
    if len(data) < 3 or data[2] not in _WHITESPACE:
        raise ImageFormatError("malformed header: missing whitespace after magic", 2)

    width, w_at, pos = _read_header_int(data, 2)
    height, h_at, pos = _read_header_int(data, pos)
    maxval, m_at, pos = _read_header_int(data, pos)
    if width < 1:
        raise ImageFormatError("malformed header: width must be positive", w_at)
    if height < 1:
        raise ImageFormatError("malformed header: height must be positive", h_at)
    if maxval != 255:
        raise ImageFormatError(f"unsupported maxval {maxval}", m_at)
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise ImageFormatError("malformed header: missing whitespace after maxval", pos)
    pos += 1

    channels = 1 if magic == b"P5" else 3
    need = width * height * channels
    have = len(data) - pos
    if have < need:
        raise ImageFormatError(f"truncated pixel data: expected {need} bytes, found {have}", pos + have)
    if have > need:
        logger.debug("ignoring %d trailing bytes after pixel data", have - need)

    payload = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos)
    if channels == 1:
        return GrayImage(width, height, payload.reshape(height, width).copy())
    return RgbImage(width, height, payload.reshape(height, width, 3).copy())


def load_image(path: str | Path) -> RgbImage | GrayImage:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise InputReadError(f"cannot read {path}: {e}") from e
    try:
        return decode_pnm(data)
    except ImageFormatError as e:
        raise ImageFormatError(f"{path}: {e.reason}", e.offset) from None


def save_image(img: RgbImage | GrayImage, path: str | Path) -> None:
    """Write P5 (gray) or P6 (RGB) with maxval 255."""
    Image.fromarray(img.pixels).save(path, format="PPM")


def rgb_to_gray(img: RgbImage) -> GrayImage:
    rgb = img.pixels.astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b
    # round half away from zero; y is never negative
    y = np.clip(np.floor(y + 0.5), 0, 255)
    return GrayImage(img.width, img.height, y.astype(np.uint8))


def to_window(img: GrayImage, crop_mode: CropMode | str = CropMode.EXACT) -> GrayWindow:
    mode = CropMode(crop_mode)
    if mode is CropMode.EXACT:
        if (img.width, img.height) != (WINDOW_WIDTH, WINDOW_HEIGHT):
            raise GeometryError(f"window must be {WINDOW_WIDTH}x{WINDOW_HEIGHT}, got {img.width}x{img.height}")
        return GrayWindow(img.width, img.height, img.pixels)

    if img.width < WINDOW_WIDTH or img.height < WINDOW_HEIGHT:
        raise GeometryError(
            f"image {img.width}x{img.height} is smaller than the {WINDOW_WIDTH}x{WINDOW_HEIGHT} window"
        )
    # odd margins leave the extra pixel on the right/bottom
    x0 = (img.width - WINDOW_WIDTH) // 2
    y0 = (img.height - WINDOW_HEIGHT) // 2
    crop = img.pixels[y0 : y0 + WINDOW_HEIGHT, x0 : x0 + WINDOW_WIDTH].copy()
    return GrayWindow(WINDOW_WIDTH, WINDOW_HEIGHT, crop)


def load_window(path: str | Path, crop_mode: CropMode | str = CropMode.EXACT) -> GrayWindow:
    img = load_image(path)
    if isinstance(img, RgbImage):
        img = rgb_to_gray(img)
    try:
        return to_window(img, crop_mode)
    except GeometryError as e:
        raise GeometryError(f"{path}: {e}") from e
