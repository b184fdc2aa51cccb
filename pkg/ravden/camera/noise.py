import logging
import math
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ravden.camera.keyed_rng import KeyedRandom
from ravden.errors import FormatError, ParameterError
from ravden.frames.types import PackedRawFrame

logger = logging.getLogger(__name__)

# Poisson rates above this switch from exact inversion to a rounded Gaussian
POISSON_INVERSION_LIMIT = 50.0
_MAX_INVERSION_STEPS = 1000

# draw indices inside each pixel's counter block
_DRAW_POISSON_UNIFORM = 0
_DRAW_POISSON_NORMAL = 1  # uses 1 and 2
_DRAW_READ_NORMAL = 3  # uses 3 and 4


class NoiseParams(BaseModel):
    """Shot variance scale and read-noise standard deviation, normalised intensity units"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    sigma_s_sq: float = Field(ge=0.0)
    sigma_r: float = Field(ge=0.0)


class NoiseSeed(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int
    frame_index: int = 0


def _iso_table() -> Dict[str, NoiseParams]:
    table = {}
    for level in range(5):
        sigma_s_sq = 1e-4 * 4.0 ** level
        table[f"iso{level + 1}"] = NoiseParams(sigma_s_sq=sigma_s_sq, sigma_r=math.sqrt(sigma_s_sq) / 4.0)
    return table


ISO_PRESETS: Dict[str, NoiseParams] = _iso_table()


def iso_preset(name: str, overrides: Optional[Mapping[str, NoiseParams]] = None) -> NoiseParams:
    """Noise parameters for one of the five ISO levels; configured overrides win"""
    if overrides and name in overrides:
        return overrides[name]
    if name not in ISO_PRESETS:
        raise ParameterError(f"Unknown ISO preset: {name}. Available: {list(ISO_PRESETS.keys())}")
    return ISO_PRESETS[name]


def _poisson_inversion(lam: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Sequential-search inversion of the Poisson CDF, vectorised over active pixels"""
    counts = np.zeros(lam.shape, dtype=np.float64)
    prob = np.exp(-lam)
    cdf = prob.copy()
    active = np.flatnonzero(u > cdf)
    step = 0
    while active.size and step < _MAX_INVERSION_STEPS:
        step += 1
        prob[active] *= lam[active] / step
        cdf[active] += prob[active]
        counts[active] = step
        active = active[u[active] > cdf[active]]
    return counts


def _sample_poisson(lam: np.ndarray, rng: KeyedRandom, pixel_index: np.ndarray) -> np.ndarray:
    counts = np.empty(lam.shape, dtype=np.float64)
    small = lam <= POISSON_INVERSION_LIMIT
    if small.any():
        u = rng.uniform(pixel_index[small], _DRAW_POISSON_UNIFORM)
        counts[small] = _poisson_inversion(lam[small], u)
    large = ~small
    if large.any():
        z = rng.normal(pixel_index[large], _DRAW_POISSON_NORMAL)
        counts[large] = np.maximum(np.round(lam[large] + np.sqrt(lam[large]) * z), 0.0)
    return counts


def add_noise(packed: PackedRawFrame, params: NoiseParams, seed: NoiseSeed) -> PackedRawFrame:
    """Shot (Poisson) plus read (Gaussian) noise, clamped to [0, 1].

    x = sigma_s_sq * Poisson(y / sigma_s_sq) + Normal(0, sigma_r^2) per pixel, with
    every random draw keyed by (seed, frame_index, plane, pixel, draw).
    """
    if params.sigma_s_sq == 0.0 and params.sigma_r == 0.0:
        return packed

    planes = []
    pixel_index = np.arange(packed.height * packed.width, dtype=np.uint64)
    for plane_index, plane in enumerate(packed.data):
        rng = KeyedRandom(seed.seed, seed.frame_index, plane_index)
        clean = plane.astype(np.float64).ravel()

        if params.sigma_s_sq > 0.0:
            lam = np.maximum(clean, 0.0) / params.sigma_s_sq
            noisy = params.sigma_s_sq * _sample_poisson(lam, rng, pixel_index)
        else:
            noisy = clean.copy()
        if params.sigma_r > 0.0:
            noisy += params.sigma_r * rng.normal(pixel_index, _DRAW_READ_NORMAL)

        planes.append(np.clip(noisy, 0.0, 1.0).reshape(plane.shape))

    logger.debug(
        f"Added noise sigma_s_sq={params.sigma_s_sq} sigma_r={params.sigma_r} "
        f"seed={seed.seed} frame={seed.frame_index}"
    )
    return PackedRawFrame(np.stack(planes))


# ---------------------------------------------------------------------------
# Sidecar files
# ---------------------------------------------------------------------------

def write_noise_sidecar(path: Union[str, Path], params: NoiseParams, seed: NoiseSeed) -> None:
    lines = [
        f"sigma_s_sq = {params.sigma_s_sq!r}",
        f"sigma_r = {params.sigma_r!r}",
        f"seed = {seed.seed}",
        f"frame_index = {seed.frame_index}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def read_noise_sidecar(path: Union[str, Path]) -> Tuple[NoiseParams, NoiseSeed]:
    values: Dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"{path}:{line_no}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value

    try:
        params = NoiseParams(sigma_s_sq=float(values["sigma_s_sq"]), sigma_r=float(values["sigma_r"]))
        seed = NoiseSeed(seed=int(values["seed"]), frame_index=int(values["frame_index"]))
    except (KeyError, ValueError) as e:
        raise FormatError(f"Incomplete noise sidecar {path}: {e}") from e
    return params, seed
