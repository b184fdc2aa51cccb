import logging
from typing import Tuple, TypeVar

import numpy as np

from ravden.align.types import FlowField, ValidityMask
from ravden.errors import DimensionError
from ravden.frames.types import Frame, PackedRawFrame

logger = logging.getLogger(__name__)

FrameT = TypeVar("FrameT", Frame, PackedRawFrame)

# forward-backward check: |Ff + Fb|^2 < ratio * (|Ff|^2 + |Fb|^2) + slack
FB_RATIO = 0.01
FB_SLACK = 0.5


def sample_grid(flow: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Absolute sample coordinates p + F(p) for a (2, H, W) flow array, float64"""
    height, width = flow.shape[1:]
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    return xs + flow[0].astype(np.float64), ys + flow[1].astype(np.float64)


def bilinear_sample(plane: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Bilinear lookup with clamp-to-edge; returns float64"""
    height, width = plane.shape
    src = plane.astype(np.float64)
    xs = np.clip(xs, 0.0, width - 1)
    ys = np.clip(ys, 0.0, height - 1)
    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    fx = xs - x0
    fy = ys - y0

    top = src[y0, x0] * (1.0 - fx) + src[y0, x1] * fx
    bottom = src[y1, x0] * (1.0 - fx) + src[y1, x1] * fx
    return top * (1.0 - fy) + bottom * fy


def inside_weight(xs: np.ndarray, ys: np.ndarray, height: int, width: int) -> np.ndarray:
    """1 inside the image, 0 a full pixel outside, linear in the border band"""
    mx = np.clip(np.minimum(1.0 + xs, width - xs), 0.0, 1.0)
    my = np.clip(np.minimum(1.0 + ys, height - ys), 0.0, 1.0)
    return mx * my


def warp(source: FrameT, flow: FlowField) -> Tuple[FrameT, ValidityMask]:
    """Sample every plane of source at p + F(p).

    Packed raw frames use one flow at packed resolution for all four planes.
    """
    height, width = source.data.shape[1:]
    if (flow.height, flow.width) != (height, width):
        raise DimensionError(
            f"Flow is {flow.height}x{flow.width} but source frame is {height}x{width}"
        )

    xs, ys = sample_grid(flow.data)
    warped = np.stack([bilinear_sample(plane, xs, ys) for plane in source.data])
    mask = ValidityMask(inside_weight(xs, ys, height, width))

    if isinstance(source, Frame):
        return Frame(warped, source.colorspace), mask
    return PackedRawFrame(warped), mask


def fb_consistency(forward: FlowField, backward: FlowField) -> ValidityMask:
    """Occlusion mask: 1 where the backward flow, read at the forward target, undoes the forward flow"""
    if forward.data.shape != backward.data.shape:
        raise DimensionError(
            f"Forward flow {forward.data.shape} and backward flow {backward.data.shape} differ"
        )

    xs, ys = sample_grid(forward.data)
    fu = forward.u.astype(np.float64)
    fv = forward.v.astype(np.float64)
    bu = bilinear_sample(backward.u, xs, ys)
    bv = bilinear_sample(backward.v, xs, ys)

    mismatch = (fu + bu) ** 2 + (fv + bv) ** 2
    magnitude = fu ** 2 + fv ** 2 + bu ** 2 + bv ** 2
    valid = mismatch < FB_RATIO * magnitude + FB_SLACK
    return ValidityMask(valid.astype(np.float32))
