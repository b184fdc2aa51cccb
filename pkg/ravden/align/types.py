import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ravden.errors import DimensionError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowField:
    """Dense displacement field (2, H, W): plane 0 is u (x), plane 1 is v (y), in pixels.

    A neighbour frame is sampled at p + F(p) to land on the reference grid.
    """

    data: np.ndarray

    def __post_init__(self):
        array = np.array(self.data, dtype=np.float32, copy=True)
        if array.ndim != 3 or array.shape[0] != 2:
            raise DimensionError(f"FlowField expects shape (2, H, W), got {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ParameterError("FlowField contains NaN or Inf values")
        array.setflags(write=False)
        object.__setattr__(self, "data", array)

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def u(self) -> np.ndarray:
        return self.data[0]

    @property
    def v(self) -> np.ndarray:
        return self.data[1]

    @classmethod
    def zeros(cls, height: int, width: int) -> "FlowField":
        return cls(np.zeros((2, height, width), dtype=np.float32))

    @classmethod
    def constant(cls, height: int, width: int, u: float, v: float) -> "FlowField":
        data = np.empty((2, height, width), dtype=np.float32)
        data[0] = u
        data[1] = v
        return cls(data)


@dataclass(frozen=True)
class FlowResult:
    """Final flow plus the full-resolution flow after every refinement pass"""

    final: FlowField
    iterations: List[FlowField]
    flat: bool = False

    def __post_init__(self):
        if not self.iterations:
            raise ParameterError("FlowResult needs at least one iteration flow")
        object.__setattr__(self, "iterations", list(self.iterations))


@dataclass(frozen=True)
class ValidityMask:
    """Per-pixel weight in [0, 1]; 1 means the aligned sample is trustworthy"""

    data: np.ndarray

    def __post_init__(self):
        array = np.array(self.data, dtype=np.float32, copy=True)
        if array.ndim != 2:
            raise DimensionError(f"ValidityMask expects a 2-d array, got shape {array.shape}")
        if array.size and (array.min() < 0.0 or array.max() > 1.0):
            raise ParameterError("ValidityMask values must lie in [0, 1]")
        array.setflags(write=False)
        object.__setattr__(self, "data", array)

    @classmethod
    def ones(cls, height: int, width: int) -> "ValidityMask":
        return cls(np.ones((height, width), dtype=np.float32))

    def __mul__(self, other: "ValidityMask") -> "ValidityMask":
        if self.data.shape != other.data.shape:
            raise DimensionError(
                f"Cannot combine masks of shape {self.data.shape} and {other.data.shape}"
            )
        return ValidityMask(self.data * other.data)
