import logging
from typing import Sequence as Seq, Tuple

import numpy as np

from ravden.align.types import FlowField, FlowResult
from ravden.align.warp import warp
from ravden.errors import DimensionError, ParameterError
from ravden.frames.types import AnyFrame

logger = logging.getLogger(__name__)


def total_variation(flow: FlowField) -> float:
    """Anisotropic TV: mean |dx u| + |dx v| over horizontal pairs plus the same over vertical pairs"""
    data = flow.data.astype(np.float64)
    tv = 0.0
    if flow.width > 1:
        tv += float(np.mean(np.abs(np.diff(data, axis=2)).sum(axis=0)))
    if flow.height > 1:
        tv += float(np.mean(np.abs(np.diff(data, axis=1)).sum(axis=0)))
    return tv


def warp_error(flow: FlowField, reference_clean: AnyFrame, target_clean: AnyFrame) -> float:
    """Mean absolute difference between the warped clean target and the clean reference"""
    warped, _ = warp(target_clean, flow)
    diff = np.abs(warped.data.astype(np.float64) - reference_clean.data.astype(np.float64))
    return float(np.mean(diff))


def weighted_flow_objective(terms: Seq[Tuple[float, float]], gamma: float = 0.8, alpha: float = 100.0) -> float:
    """Sum over passes i = 1..N of gamma^(N - i) * (alpha * L_w + L_tv); later passes weigh more"""
    if not terms:
        raise ParameterError("Flow objective needs at least one iteration")
    count = len(terms)
    total = 0.0
    for index, (l_w, l_tv) in enumerate(terms, 1):
        total += gamma ** (count - index) * (alpha * l_w + l_tv)
    return total


def flow_objective(
    result: FlowResult,
    reference_clean: AnyFrame,
    target_clean: AnyFrame,
    gamma: float = 0.8,
    alpha: float = 100.0,
) -> float:
    if reference_clean.data.shape != target_clean.data.shape:
        raise DimensionError(
            f"Clean reference {reference_clean.data.shape} and target {target_clean.data.shape} differ"
        )
    terms = [
        (warp_error(flow, reference_clean, target_clean), total_variation(flow))
        for flow in result.iterations
    ]
    value = weighted_flow_objective(terms, gamma, alpha)
    logger.debug(f"Flow objective over {len(terms)} passes: {value:.6f}")
    return value
