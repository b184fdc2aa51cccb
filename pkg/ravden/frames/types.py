import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Union

import numpy as np

from ravden.errors import DimensionError, ParameterError

logger = logging.getLogger(__name__)


class ColorSpace(str, Enum):
    SRGB = "srgb"
    LINEAR = "linear"


def _frozen_float32(data: Any, ndim: int, what: str) -> np.ndarray:
    """Copy data into a read-only float32 array and check rank and finiteness"""
    array = np.array(data, dtype=np.float32, copy=True)
    if array.ndim != ndim:
        raise DimensionError(f"{what} expects a {ndim}-d array, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ParameterError(f"{what} contains NaN or Inf values")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Frame:
    """Display-referred or linear image, channel-planar (C, H, W) float32"""

    data: np.ndarray
    colorspace: ColorSpace = ColorSpace.SRGB

    def __post_init__(self):
        array = _frozen_float32(self.data, 3, "Frame")
        if array.shape[0] not in (1, 3):
            raise DimensionError(f"Frame must have 1 or 3 channels, got {array.shape[0]}")
        object.__setattr__(self, "data", array)
        object.__setattr__(self, "colorspace", ColorSpace(self.colorspace))

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @classmethod
    def from_plane(cls, plane: np.ndarray, colorspace: ColorSpace = ColorSpace.SRGB) -> "Frame":
        """Wrap a single 2-d plane as a 1-channel frame"""
        return cls(np.asarray(plane)[np.newaxis], colorspace)


@dataclass(frozen=True)
class RawBayerFrame:
    """Single-plane RGGB sensor mosaic with even dimensions"""

    data: np.ndarray

    def __post_init__(self):
        array = _frozen_float32(self.data, 2, "RawBayerFrame")
        height, width = array.shape
        if height % 2 or width % 2:
            raise DimensionError(f"Bayer mosaic needs even dimensions, got {height}x{width}")
        object.__setattr__(self, "data", array)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class PackedRawFrame:
    """Half-resolution raw image with planes ordered (R, G1, G2, B)"""

    data: np.ndarray

    def __post_init__(self):
        array = _frozen_float32(self.data, 3, "PackedRawFrame")
        if array.shape[0] != 4:
            raise DimensionError(f"PackedRawFrame needs 4 planes, got {array.shape[0]}")
        object.__setattr__(self, "data", array)

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def channels(self) -> int:
        return 4


AnyFrame = Union[Frame, PackedRawFrame]


@dataclass(frozen=True)
class Sequence:
    """Ordered frames of one type and size with per-frame metadata"""

    frames: List[AnyFrame]
    frame_rate: Optional[float] = None
    metadata: List[Dict[str, Any]] = field(default_factory=list)

    def __post_init__(self):
        frames = list(self.frames)
        if frames:
            kind = type(frames[0])
            shape = frames[0].data.shape
            for index, frame in enumerate(frames):
                if type(frame) is not kind or frame.data.shape != shape:
                    raise DimensionError(
                        f"Sequence frame {index} is {type(frame).__name__}{frame.data.shape}, "
                        f"expected {kind.__name__}{shape}"
                    )
        metadata = [dict(item) for item in self.metadata] or [{} for _ in frames]
        if len(metadata) != len(frames):
            raise DimensionError(
                f"Sequence has {len(frames)} frames but {len(metadata)} metadata entries"
            )
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "metadata", metadata)

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, index: int) -> AnyFrame:
        return self.frames[index]

    def __iter__(self):
        return iter(self.frames)
