"""
Coarse-to-fine dense Lucas-Kanade flow.

Each pass warps the target with the current flow, solves a damped 2x2 least-squares
system per pixel over the in-bounds samples of a square window, and optionally
median-filters the update.
The full-resolution flow after every pass is kept for the weighted flow objective.
"""

import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy import ndimage

from ravden.align.types import FlowField, FlowResult
from ravden.align.warp import bilinear_sample, inside_weight, sample_grid
from ravden.errors import DimensionError, ParameterError
from ravden.frames.types import Frame

logger = logging.getLogger(__name__)

BINOMIAL_5 = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0
MIN_LEVEL_SIZE = 16
MAX_AUTO_LEVELS = 5
DAMPING = 1e-4
# largest per-pass update of either flow component, in pixels of the current level
MAX_STEP = 1.0


class FlowConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    pyramid_levels: Optional[int] = Field(default=None, ge=1)
    iters_per_level: int = Field(default=3, ge=1)
    window: int = 5
    median_filter: bool = True

    @field_validator("window")
    @classmethod
    def _odd_window(cls, window):
        if window < 3 or window % 2 == 0:
            raise ValueError(f"window must be odd and >= 3, got {window}")
        return window


def auto_levels(height: int, width: int) -> int:
    """Pyramid depth: keep halving while the coarsest level stays at least 16 px, at most 5 levels"""
    levels = 1
    size = min(height, width)
    while levels < MAX_AUTO_LEVELS and (size + 1) // 2 >= MIN_LEVEL_SIZE:
        size = (size + 1) // 2
        levels += 1
    return levels


def downsample(plane: np.ndarray) -> np.ndarray:
    blurred = ndimage.correlate1d(plane, BINOMIAL_5, axis=0, mode="nearest")
    blurred = ndimage.correlate1d(blurred, BINOMIAL_5, axis=1, mode="nearest")
    return blurred[::2, ::2]


def build_pyramid(plane: np.ndarray, levels: int) -> List[np.ndarray]:
    """Finest level first"""
    pyramid = [plane]
    for _ in range(levels - 1):
        pyramid.append(downsample(pyramid[-1]))
    return pyramid


def upsample_flow(flow: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinearly resample a (2, h, w) flow onto the next finer (height, width) grid and double it.

    Coarse pixel i sits at fine position 2i, matching the [::2] decimation.
    """
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    xs /= 2.0
    ys /= 2.0
    return np.stack([2.0 * bilinear_sample(component, xs, ys) for component in flow])


def _to_full_resolution(flow: np.ndarray, shapes: List[tuple], level: int) -> np.ndarray:
    for finer in range(level - 1, -1, -1):
        flow = upsample_flow(flow, *shapes[finer])
    return flow


def _central_gradients(plane: np.ndarray):
    padded = np.pad(plane, 1, mode="edge")
    gx = 0.5 * (padded[1:-1, 2:] - padded[1:-1, :-2])
    gy = 0.5 * (padded[2:, 1:-1] - padded[:-2, 1:-1])
    return gx, gy


def _sample_support(xs: np.ndarray, ys: np.ndarray, height: int, width: int) -> np.ndarray:
    """1 where the warped sample and its 3x3 gradient stencil lie inside the target, else 0"""
    inside = (inside_weight(xs, ys, height, width) >= 1.0).astype(np.float64)
    return ndimage.minimum_filter(inside, size=3, mode="nearest")


def refine(reference: np.ndarray, target: np.ndarray, flow: np.ndarray, cfg: FlowConfig) -> np.ndarray:
    """One windowed least-squares pass at a single pyramid level.

    Samples that clamp to the target's edge carry no weight, so pixels whose whole
    window maps outside keep their current flow and take it from the median filter.
    """
    xs, ys = sample_grid(flow)
    warped = bilinear_sample(target, xs, ys)
    support = _sample_support(xs, ys, *target.shape)
    gx, gy = _central_gradients(warped)
    gt = warped - reference

    def window_mean(values):
        return ndimage.uniform_filter(support * values, size=cfg.window, mode="nearest")

    a11 = window_mean(gx * gx) + DAMPING
    a12 = window_mean(gx * gy)
    a22 = window_mean(gy * gy) + DAMPING
    b1 = window_mean(gx * gt)
    b2 = window_mean(gy * gt)

    det = a11 * a22 - a12 * a12
    du = np.clip(-(a22 * b1 - a12 * b2) / det, -MAX_STEP, MAX_STEP)
    dv = np.clip(-(a11 * b2 - a12 * b1) / det, -MAX_STEP, MAX_STEP)

    updated = np.stack([flow[0] + du, flow[1] + dv])
    if cfg.median_filter:
        updated = np.stack([ndimage.median_filter(c, size=3, mode="nearest") for c in updated])
    return updated


def estimate_flow(reference: Frame, target: Frame, cfg: Optional[FlowConfig] = None) -> FlowResult:
    """Flow F such that target sampled at p + F(p) matches reference at p"""
    cfg = cfg or FlowConfig()
    if reference.channels != 1 or target.channels != 1:
        raise DimensionError(
            f"estimate_flow needs single-channel frames, got {reference.channels} and {target.channels}"
        )
    if reference.data.shape != target.data.shape:
        raise DimensionError(
            f"Reference {reference.data.shape} and target {target.data.shape} differ in size"
        )

    height, width = reference.height, reference.width
    ref = reference.data[0].astype(np.float64)
    tgt = target.data[0].astype(np.float64)

    if np.ptp(ref) == 0.0 and np.ptp(tgt) == 0.0:
        logger.warning(f"Flat {height}x{width} image pair, returning zero flow")
        zero = FlowField.zeros(height, width)
        return FlowResult(final=zero, iterations=[zero], flat=True)

    levels = cfg.pyramid_levels or auto_levels(height, width)
    ref_pyramid = build_pyramid(ref, levels)
    tgt_pyramid = build_pyramid(tgt, levels)
    shapes = [level.shape for level in ref_pyramid]

    iterations: List[FlowField] = []
    flow = np.zeros((2,) + shapes[-1], dtype=np.float64)
    for level in range(levels - 1, -1, -1):
        if level < levels - 1:
            flow = upsample_flow(flow, *shapes[level])
        for _ in range(cfg.iters_per_level):
            flow = refine(ref_pyramid[level], tgt_pyramid[level], flow, cfg)
            iterations.append(FlowField(_to_full_resolution(flow, shapes, level)))
        logger.debug(
            f"Flow level {level} ({shapes[level][0]}x{shapes[level][1]}): "
            f"mean |F| = {np.mean(np.hypot(flow[0], flow[1])):.4f}"
        )

    return FlowResult(final=iterations[-1], iterations=iterations)


def endpoint_error(estimated: FlowField, truth: FlowField, border: int = 0) -> float:
    """Mean endpoint error over the pixels at least `border` px from every edge"""
    if estimated.data.shape != truth.data.shape:
        raise DimensionError(
            f"Estimated flow {estimated.data.shape} and truth {truth.data.shape} differ"
        )
    height, width = estimated.height, estimated.width
    if border < 0 or 2 * border >= min(height, width):
        raise ParameterError(f"Border {border} leaves no interior in a {height}x{width} flow")

    diff = estimated.data.astype(np.float64) - truth.data.astype(np.float64)
    interior = diff[:, border:height - border, border:width - border]
    return float(np.mean(np.hypot(interior[0], interior[1])))
