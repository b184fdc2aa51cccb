import logging

import numpy as np

from ravden.errors import DimensionError
from ravden.frames.types import Frame

logger = logging.getLogger(__name__)

# Rec.709 luma weights
LUMA_WEIGHTS = np.array([0.2126, 0.7152, 0.0722], dtype=np.float64)


def luma_plane(data: np.ndarray) -> np.ndarray:
    """Weighted channel sum of a (3, H, W) array, float64"""
    return np.tensordot(LUMA_WEIGHTS, np.asarray(data, dtype=np.float64), axes=(0, 0))


def to_luma(frame: Frame) -> Frame:
    if frame.channels != 3:
        raise DimensionError(f"to_luma needs a 3-channel frame, got {frame.channels} channels")
    return Frame.from_plane(luma_plane(frame.data), frame.colorspace)


def guide_plane(frame: Frame) -> np.ndarray:
    """Single float64 plane used for alignment: luma for colour, the plane itself for gray"""
    if frame.channels == 3:
        return luma_plane(frame.data)
    return frame.data[0].astype(np.float64)
