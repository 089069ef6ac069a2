from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..utils.image_ops import GrayWindow
from .approx_math import DEFAULT_CORDIC, CordicConfig, cordic_polar, reference_polar_array

logger = logging.getLogger(__name__)


class Backend(str, Enum):
    REFERENCE = "reference"
    HARDWARE = "hardware"


@dataclass(frozen=True)
class GradientPairs:
    """Central differences over the window interior.

    fx[y - 1, x - 1] holds f_x(x, y) for window pixel (x, y), 1 <= x <= 64, 1 <= y <= 128.
    """

    fx: np.ndarray  # (128, 64) int16
    fy: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.fx.shape


@dataclass(frozen=True)
class GradientField:
    magnitudes: np.ndarray  # (128, 64)
    angles_deg: np.ndarray  # (128, 64), [0, 180)

    @property
    def interior_width(self) -> int:
        return self.magnitudes.shape[1]

    @property
    def interior_height(self) -> int:
        return self.magnitudes.shape[0]


def compute_gradients(w: GrayWindow) -> GradientPairs:
    f = w.pixels.astype(np.int16)
    # the 1-px rim only feeds the stencil
    fx = f[1:-1, 2:] - f[1:-1, :-2]
    fy = f[2:, 1:-1] - f[:-2, 1:-1]
    return GradientPairs(fx, fy)


def polarize(
    grads: GradientPairs,
    backend: Backend | str = Backend.REFERENCE,
    cordic: CordicConfig = DEFAULT_CORDIC,
) -> GradientField:
    backend = Backend(backend)
    if backend is Backend.HARDWARE:
        mag, ang = cordic_polar(grads.fx, grads.fy, cordic)
    else:
        mag, ang = reference_polar_array(grads.fx, grads.fy)
    logger.debug("polarized %dx%d gradients with %s backend", grads.shape[1], grads.shape[0], backend.value)
    return GradientField(mag, ang)
