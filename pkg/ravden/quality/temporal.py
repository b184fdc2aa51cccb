import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from ravden.align.flow import FlowConfig, estimate_flow
from ravden.align.warp import fb_consistency, warp
from ravden.errors import DimensionError, SequenceLengthError
from ravden.frames.color import guide_plane
from ravden.frames.types import ColorSpace, Frame, Sequence

logger = logging.getLogger(__name__)


def _guide(frame: Frame) -> Frame:
    return Frame.from_plane(guide_plane(frame), ColorSpace.LINEAR)


def pair_warping_error(
    denoised: Sequence, clean: Sequence, t: int, s: int, fcfg: FlowConfig
) -> Optional[float]:
    """Masked mean L1 between denoised frame t and denoised frame s warped onto t.

    Flows come from the clean frames. Returns None when no pixel survives the mask.
    """
    reference = _guide(clean[t])
    neighbour = _guide(clean[s])
    forward = estimate_flow(reference, neighbour, fcfg).final
    backward = estimate_flow(neighbour, reference, fcfg).final

    warped, validity = warp(denoised[s], forward)
    mask = (validity * fb_consistency(forward, backward)).data.astype(np.float64)
    weight = mask.sum()
    if weight == 0.0:
        return None

    error = np.mean(np.abs(denoised[t].data.astype(np.float64) - warped.data.astype(np.float64)), axis=0)
    return float(np.sum(mask * error) / weight)


def temporal_warping_error(
    denoised: Sequence, clean: Sequence, fcfg: Optional[FlowConfig] = None, threads: int = 1
) -> float:
    """Flow-based warping error averaged over every interior frame and both of its neighbours"""
    fcfg = fcfg or FlowConfig()
    if len(denoised) != len(clean):
        raise DimensionError(f"Denoised has {len(denoised)} frames, clean has {len(clean)}")
    if len(clean) < 3:
        raise SequenceLengthError(f"Warping error needs at least 3 frames, got {len(clean)}")
    if denoised[0].data.shape != clean[0].data.shape:
        raise DimensionError(
            f"Denoised frames {denoised[0].data.shape} and clean frames {clean[0].data.shape} differ"
        )

    pairs: List[Tuple[int, int]] = [(t, s) for t in range(1, len(clean) - 1) for s in (t - 1, t + 1)]

    def task(pair):
        return pair_warping_error(denoised, clean, pair[0], pair[1], fcfg)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            errors = list(executor.map(task, pairs))
    else:
        errors = [task(pair) for pair in pairs]

    valid = [error for error in errors if error is not None]
    skipped = len(errors) - len(valid)
    if skipped:
        logger.warning(f"Warping error skipped {skipped} of {len(errors)} pairs with empty masks")
    if not valid:
        return 0.0
    return float(np.mean(valid))
