"""Binary32 approximation kernels used by the hardware backend.

CORDIC vectoring gives magnitude and unsigned orientation of a gradient pair,
Newton-Raphson gives the reciprocal square root used in block normalization.
Exact float64 oracles sit next to them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError

F32 = np.float32

# fast inverse square root seed: halves the exponent with one shift
RSQRT_MAGIC = 0x5F3759DF
RSQRT_ITERATIONS = 3


def _angle_lut(iterations: int) -> tuple[float, ...]:
    return tuple(float(F32(math.degrees(math.atan(2.0 ** -i)))) for i in range(iterations))


def _gain(iterations: int) -> float:
    k = 1.0
    for i in range(iterations):
        k *= math.sqrt(1.0 + 2.0 ** (-2 * i))
    return k


@dataclass(frozen=True)
class CordicConfig:
    iterations: int = 15
    angle_lut: tuple[float, ...] = field(default=(), repr=False)
    gain: float = 0.0

    def __post_init__(self):
        if self.iterations < 1:
            raise DomainError(f"CORDIC needs at least one iteration, got {self.iterations}")
        if not self.angle_lut:
            object.__setattr__(self, "angle_lut", _angle_lut(self.iterations))
        if len(self.angle_lut) != self.iterations:
            raise DomainError("angle_lut length must equal iterations")
        if not self.gain:
            object.__setattr__(self, "gain", _gain(self.iterations))


DEFAULT_CORDIC = CordicConfig()


@dataclass(frozen=True)
class PolarResult:
    magnitude: float
    angle_deg: float


def _fold(angles: np.ndarray) -> np.ndarray:
    """Map an angle in (-180, 180] onto [0, 180)."""
    angles = np.where(angles < 0, angles + 180, angles)
    return np.where(angles >= 180, angles - 180, angles)


def cordic_polar(xs, ys, cfg: CordicConfig = DEFAULT_CORDIC) -> tuple[np.ndarray, np.ndarray]:
    """Vectoring-mode CORDIC over arrays, all arithmetic in float32.

    Returns (magnitudes, angles_deg) with angles folded into [0, 180).
    """
    x = np.asarray(xs, dtype=F32)
    y = np.asarray(ys, dtype=F32)
    zero = (x == 0) & (y == 0)

    # unsigned orientation: rotate the left half-plane by 180 degrees
    flip = (x < 0) | ((x == 0) & (y < 0))
    x = np.where(flip, -x, x)
    y = np.where(flip, -y, y)
    z = np.zeros_like(x)

    one = F32(1)
    for i in range(cfg.iterations):
        step = F32(2.0 ** -i)
        sigma = np.where(y >= 0, one, -one)
        x, y = x + sigma * y * step, y - sigma * x * step
        z = z + sigma * F32(cfg.angle_lut[i])

    mag = x / F32(cfg.gain)
    # residual below the last micro-rotation is not a real negative angle
    z = np.where((z < 0) & (z > -F32(cfg.angle_lut[-1])), F32(0), z)
    ang = _fold(z).astype(F32)

    mag = np.where(zero, F32(0), mag).astype(F32)
    ang = np.where(zero, F32(0), ang).astype(F32)
    return mag, ang


def reference_polar_array(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    mag = np.sqrt(x * x + y * y)
    ang = _fold(np.degrees(np.arctan2(y, x)))
    return mag, ang


def cordic_vectoring(x: float, y: float, cfg: CordicConfig = DEFAULT_CORDIC) -> PolarResult:
    mag, ang = cordic_polar(x, y, cfg)
    return PolarResult(float(mag), float(ang))


def reference_polar(x: float, y: float) -> PolarResult:
    mag, ang = reference_polar_array(x, y)
    return PolarResult(float(mag), float(ang))


def rsqrt_seed(a) -> np.ndarray:
    arr = np.asarray(a, dtype=F32)
    bits = arr.reshape(-1).view(np.int32)
    seed = (np.int32(RSQRT_MAGIC) - (bits >> 1)).astype(np.int32)
    return seed.view(F32).reshape(arr.shape)


def rsqrt_newton(a, iterations: int = RSQRT_ITERATIONS):
    """Approximate 1/sqrt(a) in float32 with y <- y * (1.5 - 0.5 * a * y^2).

    Accepts a scalar or an array; returns the same kind.
    """
    arr = np.asarray(a, dtype=F32)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("rsqrt_newton needs finite a > 0")
    if iterations < 0:
        raise DomainError(f"iterations must be >= 0, got {iterations}")

    y = rsqrt_seed(arr)
    half_a = F32(0.5) * arr
    for _ in range(iterations):
        y = y * (F32(1.5) - half_a * y * y)
    if np.ndim(a) == 0:
        return float(y)
    return y
