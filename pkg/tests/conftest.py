import numpy as np
import pytest
from scipy import ndimage

from ravden.frames.types import PackedRawFrame


def make_texture(height: int, width: int, seed: int = 0, sigma: float = 3.0, low: float = 0.1, high: float = 0.9):
    """Smooth random texture scaled into [low, high]"""
    rng = np.random.default_rng(seed)
    field = ndimage.gaussian_filter(rng.normal(size=(height, width)), sigma=sigma, mode="wrap")
    field = (field - field.min()) / (field.max() - field.min())
    return low + (high - low) * field


def shift_clamped(plane: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """plane moved by (dx, dy) pixels with edge replication: out(x, y) = plane(x - dx, y - dy)"""
    height, width = plane.shape
    ys = np.clip(np.arange(height) - dy, 0, height - 1)
    xs = np.clip(np.arange(width) - dx, 0, width - 1)
    return plane[np.ix_(ys, xs)]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def texture():
    return make_texture


@pytest.fixture
def packed_texture():
    """Factory for 4-plane packed raw textures with a per-plane gain"""

    def factory(height: int = 32, width: int = 32, seed: int = 0, sigma: float = 3.0):
        base = make_texture(height, width, seed, sigma, low=0.15, high=0.75)
        return np.stack([base * gain for gain in (1.0, 1.1, 1.05, 0.9)])

    return factory


@pytest.fixture
def packed_ramp():
    """Planar ramps: the Haar diagonal band of every plane is exactly zero"""

    def factory(height: int = 24, width: int = 24):
        ys, xs = np.mgrid[0:height, 0:width]
        planes = [0.2 + 0.004 * k + 0.005 * xs + 0.003 * ys for k in range(4)]
        return PackedRawFrame(np.stack(planes))

    return factory
