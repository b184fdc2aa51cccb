"""
One denoiser block: align the two neighbours of a centre frame and merge the
registered triple with residual-confidence weights. The same fusion takes any
number of registered neighbours for single-stage windows.

The centre always carries weight 1, so every output pixel is a convex combination
of the centre and the warped neighbours before the optional spatial pass.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence as Seq, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy import ndimage

from ravden.align.flow import FlowConfig, estimate_flow
from ravden.align.types import FlowField, ValidityMask
from ravden.align.warp import fb_consistency, warp
from ravden.errors import DimensionError
from ravden.frames.bayer import green_mean
from ravden.frames.types import ColorSpace, Frame, PackedRawFrame

logger = logging.getLogger(__name__)

# median(|N(0,1)|)
MAD_TO_SIGMA = 0.6745
MIN_NOISE_DIM = 4


class FusionConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    bandwidth_scale: float = Field(default=2.0, gt=0.0)
    residual_box: int = 3
    spatial_filter: bool = True
    spatial_filter_strength: float = Field(default=1.0, ge=0.0)

    @field_validator("residual_box")
    @classmethod
    def _odd_box(cls, box):
        if box < 1 or box % 2 == 0:
            raise ValueError(f"residual_box must be a positive odd size, got {box}")
        return box


@dataclass(frozen=True)
class PairFlows:
    """Flows between the centre frame and one neighbour.

    forward aligns the neighbour onto the centre grid; backward aligns the centre
    onto the neighbour grid and is only used for the consistency mask.
    """

    forward: FlowField
    backward: FlowField


@dataclass(frozen=True)
class BlockReport:
    output: PackedRawFrame
    noise_sigma: Tuple[float, float, float, float]
    bandwidth: float
    mean_support: float


def estimate_noise_sigma(frame: PackedRawFrame) -> Tuple[float, float, float, float]:
    """Per-plane noise sigma from the MAD of the 2x2 Haar diagonal band"""
    if frame.height < MIN_NOISE_DIM or frame.width < MIN_NOISE_DIM:
        raise DimensionError(
            f"Noise estimation needs at least {MIN_NOISE_DIM}x{MIN_NOISE_DIM} planes, "
            f"got {frame.height}x{frame.width}"
        )
    h2, w2 = frame.height // 2, frame.width // 2
    sigmas = []
    for plane in frame.data.astype(np.float64):
        a = plane[0:2 * h2:2, 0:2 * w2:2]
        b = plane[0:2 * h2:2, 1:2 * w2:2]
        c = plane[1:2 * h2:2, 0:2 * w2:2]
        d = plane[1:2 * h2:2, 1:2 * w2:2]
        diagonal = 0.5 * (a - b - c + d)
        sigmas.append(float(np.median(np.abs(diagonal)) / MAD_TO_SIGMA))
    return tuple(sigmas)


def _neighbour_weight(residual: np.ndarray, mask: np.ndarray, bandwidth: float) -> np.ndarray:
    if bandwidth > 0.0:
        return mask * np.exp(-residual ** 2 / (2.0 * bandwidth ** 2))
    # noise-free centre: only exact agreement earns support
    return mask * (residual == 0.0)


def _spatial_pass(image: np.ndarray, range_sigma: np.ndarray) -> np.ndarray:
    """3x3 bilateral pass with a per-pixel range sigma; sigma 0 leaves the pixel as is"""
    height, width = image.shape[1:]
    active = range_sigma > 0.0
    if not active.any():
        return image
    safe_sigma = np.where(active, range_sigma, 1.0)

    result = np.empty_like(image)
    for index, plane in enumerate(image):
        padded = np.pad(plane, 1, mode="edge")
        numerator = np.zeros_like(plane)
        denominator = np.zeros_like(plane)
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                neighbour = padded[1 + dy:1 + dy + height, 1 + dx:1 + dx + width]
                weight = np.exp(-0.5 * (dx * dx + dy * dy))
                weight = weight * np.exp(-((neighbour - plane) ** 2) / (2.0 * safe_sigma ** 2))
                numerator += weight * neighbour
                denominator += weight
        result[index] = np.where(active, numerator / denominator, plane)
    return result


def fuse_frames_report(
    center: PackedRawFrame,
    warped: Seq[PackedRawFrame],
    masks: Seq[ValidityMask],
    cfg: FusionConfig,
) -> BlockReport:
    """Fuse the centre with any number of registered neighbours, one validity mask each"""
    shape = center.data.shape
    if not warped:
        raise DimensionError("Fusion needs at least one warped neighbour")
    if len(masks) != len(warped):
        raise DimensionError(f"Fusion needs one validity mask per neighbour, got {len(masks)} for {len(warped)}")
    for index, frame in enumerate(warped):
        if frame.data.shape != shape:
            raise DimensionError(f"Warped neighbour {index} is {frame.data.shape}, centre frame is {shape}")
    for mask in masks:
        if mask.data.shape != shape[1:]:
            raise DimensionError(f"Validity mask {mask.data.shape} does not match frame {shape[1:]}")

    if all(not mask.data.any() for mask in masks):
        logger.warning("Every validity mask is empty; the block falls back to the centre frame")

    sigma = estimate_noise_sigma(center)
    bandwidth = cfg.bandwidth_scale * float(np.mean(sigma))

    base = center.data.astype(np.float64)
    numerator = base.copy()
    support = np.zeros(shape[1:], dtype=np.float64)
    for neighbour, mask in zip(warped, masks):
        aligned = neighbour.data.astype(np.float64)
        residual = np.mean(np.abs(aligned - base), axis=0)
        if cfg.residual_box > 1:
            residual = ndimage.uniform_filter(residual, size=cfg.residual_box, mode="nearest")
        weight = _neighbour_weight(residual, mask.data.astype(np.float64), bandwidth)
        numerator += weight * aligned
        support += weight

    fused = numerator / (1.0 + support)
    if cfg.spatial_filter:
        range_sigma = cfg.spatial_filter_strength * bandwidth / np.sqrt(1.0 + support)
        fused = _spatial_pass(fused, range_sigma)

    mean_support = float(np.mean(support))
    logger.debug(
        f"Fused {len(warped)} neighbours: sigma={np.round(sigma, 5).tolist()} "
        f"h={bandwidth:.5f} support={mean_support:.3f}"
    )
    return BlockReport(PackedRawFrame(fused), sigma, bandwidth, mean_support)


def fuse_triple_report(
    warped_prev: PackedRawFrame,
    center: PackedRawFrame,
    warped_next: PackedRawFrame,
    masks: Seq[ValidityMask],
    cfg: FusionConfig,
) -> BlockReport:
    if len(masks) != 2:
        raise DimensionError(f"fuse_triple needs 2 validity masks, got {len(masks)}")
    return fuse_frames_report(center, (warped_prev, warped_next), masks, cfg)


def fuse_triple(
    warped_prev: PackedRawFrame,
    center: PackedRawFrame,
    warped_next: PackedRawFrame,
    masks: Seq[ValidityMask],
    cfg: FusionConfig,
) -> PackedRawFrame:
    return fuse_triple_report(warped_prev, center, warped_next, masks, cfg).output


def flow_guide(frame: PackedRawFrame) -> Frame:
    return Frame.from_plane(green_mean(frame), ColorSpace.LINEAR)


def align_pair(center: PackedRawFrame, neighbour: PackedRawFrame, fcfg: FlowConfig) -> PairFlows:
    """Forward and backward flows between centre and neighbour on their green means"""
    if center.data.shape != neighbour.data.shape:
        raise DimensionError(
            f"Neighbour {neighbour.data.shape} does not match centre {center.data.shape}"
        )
    center_guide = flow_guide(center)
    neighbour_guide = flow_guide(neighbour)
    forward = estimate_flow(center_guide, neighbour_guide, fcfg).final
    backward = estimate_flow(neighbour_guide, center_guide, fcfg).final
    return PairFlows(forward=forward, backward=backward)


def register(neighbour: PackedRawFrame, pair: PairFlows) -> Tuple[PackedRawFrame, ValidityMask]:
    """Warp a neighbour onto the centre grid; the mask combines bounds and forward-backward checks"""
    aligned, validity = warp(neighbour, pair.forward)
    return aligned, validity * fb_consistency(pair.forward, pair.backward)


def run_block(
    prev: PackedRawFrame,
    center: PackedRawFrame,
    next_frame: PackedRawFrame,
    fcfg: FlowConfig,
    mcfg: FusionConfig,
    flows: Optional[Tuple[PairFlows, PairFlows]] = None,
) -> BlockReport:
    """denoise_block with its diagnostics; pre-computed pair flows skip estimation"""
    if flows is None:
        flows = (align_pair(center, prev, fcfg), align_pair(center, next_frame, fcfg))

    (warped_prev, prev_mask), (warped_next, next_mask) = (
        register(neighbour, pair) for neighbour, pair in zip((prev, next_frame), flows)
    )
    return fuse_triple_report(warped_prev, center, warped_next, (prev_mask, next_mask), mcfg)


def denoise_block(
    prev: PackedRawFrame,
    center: PackedRawFrame,
    next_frame: PackedRawFrame,
    fcfg: Optional[FlowConfig] = None,
    mcfg: Optional[FusionConfig] = None,
    flows: Optional[Tuple[PairFlows, PairFlows]] = None,
) -> PackedRawFrame:
    return run_block(prev, center, next_frame, fcfg or FlowConfig(), mcfg or FusionConfig(), flows).output
