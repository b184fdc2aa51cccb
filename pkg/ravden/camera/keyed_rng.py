"""
Counter-based random numbers.

Every value is a pure function of (seed, frame_index, plane, pixel index, draw index),
so synthesis gives the same bits whatever order or thread layout evaluates it.
"""

import logging

import numpy as np

logger = logging.getLogger(__name__)

_MASK64 = 0xFFFF_FFFF_FFFF_FFFF
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_DOUBLE_UNIT = 1.0 / (1 << 53)

# draws reserved per pixel; keeps counters of neighbouring pixels disjoint
DRAWS_PER_PIXEL = 8


def splitmix64(values: np.ndarray) -> np.ndarray:
    """SplitMix64 finaliser over a uint64 array (wrap-around arithmetic)"""
    z = np.atleast_1d(np.asarray(values, dtype=np.uint64))
    with np.errstate(over="ignore"):
        z = z + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class KeyedRandom:
    """Uniform and normal variates addressed by (pixel index, draw index) under a fixed key"""

    def __init__(self, seed: int, frame_index: int, plane: int):
        self.seed = int(seed)
        self.frame_index = int(frame_index)
        self.plane = int(plane)
        key = splitmix64(np.array([self.seed & _MASK64], dtype=np.uint64))
        key = splitmix64(key ^ np.uint64(self.frame_index & _MASK64))
        self._key = splitmix64(key ^ np.uint64(self.plane & _MASK64))[0]

    def bits(self, pixel_index: np.ndarray, draw: int) -> np.ndarray:
        counter = np.asarray(pixel_index, dtype=np.uint64) * np.uint64(DRAWS_PER_PIXEL)
        counter = counter + np.uint64(draw)
        return splitmix64(splitmix64(counter) ^ self._key)

    def uniform(self, pixel_index: np.ndarray, draw: int) -> np.ndarray:
        """Doubles strictly inside (0, 1)"""
        mantissa = (self.bits(pixel_index, draw) >> np.uint64(11)).astype(np.float64)
        return (mantissa + 0.5) * _DOUBLE_UNIT

    def normal(self, pixel_index: np.ndarray, draw: int) -> np.ndarray:
        """Standard normal via Box-Muller on draws (draw, draw + 1)"""
        u1 = self.uniform(pixel_index, draw)
        u2 = self.uniform(pixel_index, draw + 1)
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
