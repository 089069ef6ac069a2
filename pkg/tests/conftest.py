from __future__ import annotations

import numpy as np
import pytest

from hoginator.utils.image_ops import WINDOW_HEIGHT, WINDOW_WIDTH, GrayWindow
from hoginator.utils.synthetic import synth_window, write_dataset


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def flat_window():
    return GrayWindow.from_array(np.full((WINDOW_HEIGHT, WINDOW_WIDTH), 128, dtype=np.uint8))


@pytest.fixture
def noise_window(rng):
    return GrayWindow.from_array(rng.integers(0, 256, size=(WINDOW_HEIGHT, WINDOW_WIDTH), dtype=np.uint8))


@pytest.fixture
def ramp_window():
    xs = np.arange(WINDOW_WIDTH, dtype=np.uint8)
    return GrayWindow.from_array(np.tile(xs, (WINDOW_HEIGHT, 1)))


@pytest.fixture
def blocky_window():
    # axis-aligned rectangles: gradients only at 0 or 90 degrees
    px = np.full((WINDOW_HEIGHT, WINDOW_WIDTH), 40, dtype=np.uint8)
    px[20:100, 15:50] = 200
    px[60:80, 25:40] = 90
    return GrayWindow.from_array(px)


@pytest.fixture(scope="session")
def synthetic_windows():
    r = np.random.default_rng(7)
    return [(synth_window(i % 2, r), i % 2) for i in range(100)]


@pytest.fixture
def dataset(tmp_path):
    return write_dataset(tmp_path / "data", 20, seed=3)
