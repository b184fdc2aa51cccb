import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ravden.errors import DimensionError, ParameterError
from ravden.frames.color import guide_plane
from ravden.frames.types import Frame

logger = logging.getLogger(__name__)

DEFAULT_MASK_ALPHA = 0.8 * math.sqrt(2.0)


@dataclass(frozen=True)
class GradientMask:
    """Soft texture indicator in [0, 1): near 0 on flat regions, approaching 1 on strong edges"""

    data: np.ndarray

    def __post_init__(self):
        array = np.array(self.data, dtype=np.float64, copy=True)
        if array.ndim != 2:
            raise DimensionError(f"GradientMask expects a 2-d array, got shape {array.shape}")
        array.setflags(write=False)
        object.__setattr__(self, "data", array)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


def gradient_magnitude(plane: np.ndarray) -> np.ndarray:
    """Box-filtered central-difference gradient magnitude with replicated borders"""
    padded = np.pad(np.asarray(plane, dtype=np.float64), 1, mode="edge")
    gx = 0.5 * (padded[1:-1, 2:] - padded[1:-1, :-2])
    gy = 0.5 * (padded[2:, 1:-1] - padded[:-2, 1:-1])
    gx = ndimage.uniform_filter(gx, size=3, mode="nearest")
    gy = ndimage.uniform_filter(gy, size=3, mode="nearest")
    return np.sqrt(gx ** 2 + gy ** 2)


def gradient_mask(frame: Frame, alpha: float = DEFAULT_MASK_ALPHA) -> GradientMask:
    """tanh(|grad| / alpha) on the grayscale frame"""
    if alpha <= 0.0:
        raise ParameterError(f"Mask alpha must be positive, got {alpha}")
    magnitude = gradient_magnitude(guide_plane(frame))
    return GradientMask(np.tanh(magnitude / alpha))


def conditioned_critic_input(frame: Frame, mask: GradientMask) -> np.ndarray:
    """Frame planes with the mask appended as an extra channel, (C + 1, H, W) float64"""
    if (mask.height, mask.width) != (frame.height, frame.width):
        raise DimensionError(
            f"Mask {mask.height}x{mask.width} does not match frame {frame.height}x{frame.width}"
        )
    return np.concatenate([frame.data.astype(np.float64), mask.data[np.newaxis]], axis=0)
