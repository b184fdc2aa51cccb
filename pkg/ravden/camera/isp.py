"""
Deterministic camera pipeline: sRGB -> raw ("unprocessing") and raw -> sRGB.

Forward order: white balance, bilinear demosaic, colour matrix, tone curve, sRGB encode.
Unprocessing runs the inverse steps in reverse order and mosaics to RGGB.
"""

import logging
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from ravden.errors import DimensionError, ParameterError
from ravden.frames.bayer import pack_bayer
from ravden.frames.types import ColorSpace, Frame, PackedRawFrame, RawBayerFrame

logger = logging.getLogger(__name__)

IDENTITY_CCM = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))


class IspParams(BaseModel):
    """White balance gains, camera-to-sRGB colour matrix and tone curve switch"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    wb_gains: Tuple[float, float, float] = (2.0, 1.0, 1.5)
    ccm: Tuple[Tuple[float, float, float], Tuple[float, float, float], Tuple[float, float, float]] = IDENTITY_CCM
    apply_tone_curve: bool = True

    @field_validator("wb_gains")
    @classmethod
    def _positive_gains(cls, gains):
        if any(g <= 0.0 for g in gains):
            raise ValueError(f"white balance gains must be positive, got {gains}")
        return gains

    @field_validator("ccm")
    @classmethod
    def _rows_sum_to_one(cls, ccm):
        for row in ccm:
            if abs(sum(row) - 1.0) > 1e-6:
                raise ValueError(f"ccm rows must sum to 1, got row {row}")
        return ccm

    @classmethod
    def identity(cls) -> "IspParams":
        return cls(wb_gains=(1.0, 1.0, 1.0), ccm=IDENTITY_CCM, apply_tone_curve=False)

    def ccm_array(self) -> np.ndarray:
        return np.array(self.ccm, dtype=np.float64)

    def gains_array(self) -> np.ndarray:
        return np.array(self.wb_gains, dtype=np.float64)


# ---------------------------------------------------------------------------
# Transfer functions
# ---------------------------------------------------------------------------

def srgb_to_linear(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return np.where(x <= 0.04045, x / 12.92, ((x + 0.055) / 1.055) ** 2.4)


def linear_to_srgb(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return np.where(x <= 0.0031308, 12.92 * x, 1.055 * x ** (1.0 / 2.4) - 0.055)


def smoothstep(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return 3.0 * x ** 2 - 2.0 * x ** 3


def inverse_smoothstep(y: np.ndarray) -> np.ndarray:
    y = np.clip(y, 0.0, 1.0)
    return 0.5 - np.sin(np.arcsin(1.0 - 2.0 * y) / 3.0)


def _apply_matrix(matrix: np.ndarray, rgb: np.ndarray) -> np.ndarray:
    """Per-pixel matrix product on channel-planar (3, H, W) data"""
    return np.tensordot(matrix, rgb, axes=(1, 0))


# ---------------------------------------------------------------------------
# Demosaic
# ---------------------------------------------------------------------------

def demosaic_bilinear(packed: np.ndarray) -> np.ndarray:
    """Bilinear RGGB demosaic of a (4, h, w) packed array into (3, 2h, 2w), float64.

    Missing samples average their 2 or 4 nearest same-colour neighbours; neighbours
    outside the image are clamped to the nearest packed cell.
    """
    r, g1, g2, b = (np.pad(p.astype(np.float64), 1, mode="edge") for p in packed)
    h, w = packed.shape[1:]
    c = (slice(1, h + 1), slice(1, w + 1))

    def at(plane, dy, dx):
        return plane[1 + dy:h + 1 + dy, 1 + dx:w + 1 + dx]

    rgb = np.empty((3, 2 * h, 2 * w), dtype=np.float64)
    # red lives at (even, even)
    rgb[0, 0::2, 0::2] = r[c]
    rgb[0, 0::2, 1::2] = 0.5 * (at(r, 0, 0) + at(r, 0, 1))
    rgb[0, 1::2, 0::2] = 0.5 * (at(r, 0, 0) + at(r, 1, 0))
    rgb[0, 1::2, 1::2] = 0.25 * (at(r, 0, 0) + at(r, 0, 1) + at(r, 1, 0) + at(r, 1, 1))
    # blue lives at (odd, odd)
    rgb[2, 1::2, 1::2] = b[c]
    rgb[2, 1::2, 0::2] = 0.5 * (at(b, 0, -1) + at(b, 0, 0))
    rgb[2, 0::2, 1::2] = 0.5 * (at(b, -1, 0) + at(b, 0, 0))
    rgb[2, 0::2, 0::2] = 0.25 * (at(b, -1, -1) + at(b, -1, 0) + at(b, 0, -1) + at(b, 0, 0))
    # green: G1 at (even, odd), G2 at (odd, even)
    rgb[1, 0::2, 1::2] = g1[c]
    rgb[1, 1::2, 0::2] = g2[c]
    rgb[1, 0::2, 0::2] = 0.25 * (at(g2, -1, 0) + at(g2, 0, 0) + at(g1, 0, -1) + at(g1, 0, 0))
    rgb[1, 1::2, 1::2] = 0.25 * (at(g1, 0, 0) + at(g1, 1, 0) + at(g2, 0, 0) + at(g2, 0, 1))
    return rgb


def mosaic_rggb(rgb: np.ndarray) -> RawBayerFrame:
    _, height, width = rgb.shape
    if height % 2 or width % 2:
        raise DimensionError(f"Mosaicing needs even dimensions, got {height}x{width}")
    raw = np.empty((height, width), dtype=np.float64)
    raw[0::2, 0::2] = rgb[0, 0::2, 0::2]
    raw[0::2, 1::2] = rgb[1, 0::2, 1::2]
    raw[1::2, 0::2] = rgb[1, 1::2, 0::2]
    raw[1::2, 1::2] = rgb[2, 1::2, 1::2]
    return RawBayerFrame(raw)


# ---------------------------------------------------------------------------
# Pipelines
# ---------------------------------------------------------------------------

def unprocess(frame: Frame, params: IspParams) -> PackedRawFrame:
    """Invert the display pipeline of an sRGB frame and pack it as RGGB raw"""
    if frame.channels != 3:
        raise DimensionError(f"unprocess needs a 3-channel sRGB frame, got {frame.channels}")
    ccm = params.ccm_array()
    if abs(np.linalg.det(ccm)) < 1e-12:
        raise ParameterError(f"Colour matrix is singular: {params.ccm}")

    rgb = srgb_to_linear(frame.data.astype(np.float64))
    if params.apply_tone_curve:
        rgb = inverse_smoothstep(rgb)
    rgb = _apply_matrix(np.linalg.inv(ccm), rgb)
    rgb = rgb / params.gains_array()[:, np.newaxis, np.newaxis]
    rgb = np.clip(rgb, 0.0, 1.0)
    return pack_bayer(mosaic_rggb(rgb))


def process_isp(packed: PackedRawFrame, params: IspParams) -> Frame:
    """Render packed raw to display-referred sRGB"""
    r_gain, g_gain, b_gain = params.wb_gains
    gains = np.array([r_gain, g_gain, g_gain, b_gain], dtype=np.float64)
    balanced = packed.data.astype(np.float64) * gains[:, np.newaxis, np.newaxis]

    rgb = demosaic_bilinear(balanced)
    rgb = np.clip(_apply_matrix(params.ccm_array(), rgb), 0.0, 1.0)
    if params.apply_tone_curve:
        rgb = smoothstep(rgb)
    srgb = np.clip(linear_to_srgb(rgb), 0.0, 1.0)
    return Frame(srgb, ColorSpace.SRGB)
