"""
Loss evaluators. Critic scores and feature stacks are supplied by the caller;
every expectation is a float64 arithmetic mean.
"""

import logging
from typing import Sequence as Seq

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ravden.errors import DimensionError, ParameterError
from ravden.frames.types import Frame, PackedRawFrame

logger = logging.getLogger(__name__)

ScoreMap = np.ndarray
FeatureStack = Seq[np.ndarray]


class LossWeights(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    lambda_f: float = Field(default=1e-2, ge=0.0)
    lambda_r: float = Field(default=1e-1, ge=0.0)
    lambda_p: float = Field(default=5e-3, ge=0.0)
    lambda_g: float = Field(default=5e-5, ge=0.0)
    delta: float = Field(default=0.5, ge=0.0)


def _scores(values, name: str) -> np.ndarray:
    array = np.asarray(values, dtype=np.float64)
    if array.size == 0:
        raise ParameterError(f"{name} score map is empty")
    return array


def hinge_d_loss(real: ScoreMap, fake: ScoreMap) -> float:
    real = _scores(real, "real")
    fake = _scores(fake, "fake")
    real_term = -np.mean(np.minimum(0.0, -1.0 + real))
    fake_term = -np.mean(np.minimum(0.0, -1.0 - fake))
    return float(real_term + fake_term)


def hinge_g_loss(fake: ScoreMap, lambda_g: float = 5e-5) -> float:
    return float(-lambda_g * np.mean(_scores(fake, "fake")))


def _stack_l1(first: FeatureStack, second: FeatureStack) -> float:
    if len(first) != len(second):
        raise DimensionError(f"Feature stacks have {len(first)} and {len(second)} layers")
    total = 0.0
    for index, (a, b) in enumerate(zip(first, second)):
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if a.shape != b.shape:
            raise DimensionError(f"Feature layer {index} shapes differ: {a.shape} vs {b.shape}")
        if a.size == 0:
            raise ParameterError(f"Feature layer {index} is empty")
        total += float(np.mean(np.abs(a - b)))
    return total


def feature_matching_loss(real: FeatureStack, fake: FeatureStack) -> float:
    """Sum over critic layers of the element-normalised L1 distance"""
    return _stack_l1(real, fake)


def perceptual_loss(gt_features: FeatureStack, pred_features: FeatureStack) -> float:
    """Same reduction as feature matching, over any feature extractor's stacks"""
    return _stack_l1(gt_features, pred_features)


def _mean_l1(pred, ref, domain: str) -> float:
    if pred.data.shape != ref.data.shape:
        raise DimensionError(f"{domain} prediction {pred.data.shape} and target {ref.data.shape} differ")
    return float(np.mean(np.abs(pred.data.astype(np.float64) - ref.data.astype(np.float64))))


def reconstruction_loss(
    raw_pred: PackedRawFrame,
    raw_gt: PackedRawFrame,
    srgb_pred: Frame,
    srgb_gt: Frame,
    delta: float = 0.5,
) -> float:
    return _mean_l1(raw_pred, raw_gt, "raw") + delta * _mean_l1(srgb_pred, srgb_gt, "sRGB")


def total_objective(adv_g: float, feat: float, recn: float, prcp: float, weights: LossWeights = LossWeights()) -> float:
    return adv_g + weights.lambda_f * feat + weights.lambda_r * recn + weights.lambda_p * prcp
