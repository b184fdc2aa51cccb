import logging
from typing import List

import numpy as np

from ravden.frames.color import guide_plane
from ravden.frames.types import Frame

logger = logging.getLogger(__name__)

DEFAULT_SCALES = 3


def _half(plane: np.ndarray) -> np.ndarray:
    """2x2 average; a trailing odd row or column is dropped"""
    height, width = (plane.shape[0] // 2) * 2, (plane.shape[1] // 2) * 2
    cropped = plane[:height, :width]
    return 0.25 * (cropped[0::2, 0::2] + cropped[0::2, 1::2] + cropped[1::2, 0::2] + cropped[1::2, 1::2])


def pyramid_features(frame: Frame, scales: int = DEFAULT_SCALES) -> List[np.ndarray]:
    """Hand-crafted perceptual features: per scale a (3, h, w) stack of luma, |gx| and |gy|"""
    plane = guide_plane(frame)
    layers = []
    for scale in range(scales):
        if scale:
            plane = _half(plane)
        padded = np.pad(plane, 1, mode="edge")
        gx = np.abs(0.5 * (padded[1:-1, 2:] - padded[1:-1, :-2]))
        gy = np.abs(0.5 * (padded[2:, 1:-1] - padded[:-2, 1:-1]))
        layers.append(np.stack([plane, gx, gy]))
    return layers
