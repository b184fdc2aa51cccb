import logging
import math
from typing import Union

import numpy as np
from scipy import ndimage

from ravden.errors import DimensionError
from ravden.frames.types import Frame, PackedRawFrame

logger = logging.getLogger(__name__)

SSIM_SIGMA = 1.5
SSIM_TRUNCATE = 3.5  # radius 5, an 11x11 window
SSIM_RADIUS = 5
SSIM_C1 = 0.01 ** 2
SSIM_C2 = 0.03 ** 2


def _check_pair(pred, ref) -> None:
    if pred.data.shape != ref.data.shape:
        raise DimensionError(f"Prediction {pred.data.shape} and reference {ref.data.shape} differ")


def psnr(pred: Union[Frame, PackedRawFrame], ref: Union[Frame, PackedRawFrame], peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; identical inputs give math.inf"""
    _check_pair(pred, ref)
    mse = float(np.mean((pred.data.astype(np.float64) - ref.data.astype(np.float64)) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak ** 2 / mse)


def ssim_plane(x: np.ndarray, y: np.ndarray) -> float:
    """Mean local SSIM of two planes, ignoring the 5 px band the window cannot cover"""
    height, width = x.shape
    if min(height, width) < 2 * SSIM_RADIUS + 1:
        raise DimensionError(f"SSIM needs planes of at least 11x11, got {height}x{width}")

    def blur(values):
        return ndimage.gaussian_filter(values, sigma=SSIM_SIGMA, truncate=SSIM_TRUNCATE, mode="reflect")

    x = x.astype(np.float64)
    y = y.astype(np.float64)
    mu_x = blur(x)
    mu_y = blur(y)
    var_x = blur(x * x) - mu_x ** 2
    var_y = blur(y * y) - mu_y ** 2
    cov = blur(x * y) - mu_x * mu_y

    numerator = (2.0 * mu_x * mu_y + SSIM_C1) * (2.0 * cov + SSIM_C2)
    denominator = (mu_x ** 2 + mu_y ** 2 + SSIM_C1) * (var_x + var_y + SSIM_C2)
    ssim_map = numerator / denominator
    r = SSIM_RADIUS
    return float(np.mean(ssim_map[r:height - r, r:width - r]))


def ssim(pred: Frame, ref: Frame) -> float:
    """Structural similarity; multi-channel frames average the per-channel scores"""
    _check_pair(pred, ref)
    return float(np.mean([ssim_plane(p, r) for p, r in zip(pred.data, ref.data)]))


def ssim_packed(pred: PackedRawFrame, ref: PackedRawFrame) -> float:
    """Raw-domain SSIM: mean over the four packed planes"""
    _check_pair(pred, ref)
    return float(np.mean([ssim_plane(p, r) for p, r in zip(pred.data, ref.data)]))
