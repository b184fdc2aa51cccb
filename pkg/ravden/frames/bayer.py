import logging

import numpy as np

from ravden.frames.types import PackedRawFrame, RawBayerFrame

logger = logging.getLogger(__name__)

# (row, column) offset inside each 2x2 RGGB cell, in packed plane order R, G1, G2, B
BAYER_OFFSETS = ((0, 0), (0, 1), (1, 0), (1, 1))


def pack_bayer(raw: RawBayerFrame) -> PackedRawFrame:
    """Rearrange an RGGB mosaic into a half-resolution 4-plane image"""
    planes = [raw.data[dy::2, dx::2] for dy, dx in BAYER_OFFSETS]
    return PackedRawFrame(np.stack(planes, axis=0))


def unpack_bayer(packed: PackedRawFrame) -> RawBayerFrame:
    """Inverse of pack_bayer"""
    mosaic = np.empty((packed.height * 2, packed.width * 2), dtype=np.float32)
    for plane, (dy, dx) in zip(packed.data, BAYER_OFFSETS):
        mosaic[dy::2, dx::2] = plane
    return RawBayerFrame(mosaic)


def green_mean(packed: PackedRawFrame) -> np.ndarray:
    """Mean of the two green planes, the flow guide for raw frames (float64)"""
    return 0.5 * (packed.data[1].astype(np.float64) + packed.data[2].astype(np.float64))
