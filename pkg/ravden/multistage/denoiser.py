"""
Batch evaluation of one (2N + 1)-frame window through N stages of denoiser blocks.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence as Seq, Tuple

import numpy as np

from ravden.align.flow import FlowConfig
from ravden.errors import DimensionError, SequenceLengthError
from ravden.frames.types import PackedRawFrame
from ravden.fusion.fuse import BlockReport, PairFlows, align_pair, fuse_frames_report, register, run_block
from ravden.multistage.schedule import DenoiseConfig, StageSchedule

logger = logging.getLogger(__name__)


class FlowProvider:
    """Supplies the two pair alignments a block needs and counts how many were estimated.

    With reuse enabled, stage-1 alignments are cached by absolute (centre, neighbour)
    index and later stages read them instead of aligning their own, cleaner inputs.
    """

    def __init__(self, fcfg: FlowConfig, reuse: bool = False):
        self.fcfg = fcfg
        self.reuse = reuse
        self.pair_alignments = 0
        self._cache: Dict[Tuple[int, int], PairFlows] = {}
        self._lock = threading.Lock()

    def align(self, center: PackedRawFrame, neighbour: PackedRawFrame) -> PairFlows:
        flows = align_pair(center, neighbour, self.fcfg)
        with self._lock:
            self.pair_alignments += 1
        return flows

    def _pair(self, stage: int, center_index: int, neighbour_index: int,
              center: PackedRawFrame, neighbour: PackedRawFrame) -> PairFlows:
        if not self.reuse:
            return self.align(center, neighbour)

        key = (center_index, neighbour_index)
        if stage > 1:
            with self._lock:
                cached = self._cache.get(key)
            if cached is not None:
                return cached
            logger.warning(f"No stage-1 flow cached for pair {key}, aligning stage {stage} inputs")
        flows = self.align(center, neighbour)
        if stage == 1:
            with self._lock:
                self._cache[key] = flows
        return flows

    def flows_for(
        self,
        stage: int,
        center_index: int,
        prev: PackedRawFrame,
        center: PackedRawFrame,
        next_frame: PackedRawFrame,
    ) -> Tuple[PairFlows, PairFlows]:
        return (
            self._pair(stage, center_index, center_index - 1, center, prev),
            self._pair(stage, center_index, center_index + 1, center, next_frame),
        )

    def evict_through(self, center_index: int) -> None:
        """Drop cached flows whose centre is at or before center_index"""
        with self._lock:
            for key in [key for key in self._cache if key[0] <= center_index]:
                del self._cache[key]

    @property
    def cached_pairs(self) -> int:
        return len(self._cache)


@dataclass(frozen=True)
class WindowResult:
    output: PackedRawFrame
    reports: Dict[int, List[BlockReport]]
    pair_alignments: int

    @property
    def blocks(self) -> int:
        return sum(len(reports) for reports in self.reports.values())


def block_at(
    stage: int,
    center_index: int,
    prev: PackedRawFrame,
    center: PackedRawFrame,
    next_frame: PackedRawFrame,
    cfg: DenoiseConfig,
    provider: FlowProvider,
) -> BlockReport:
    flows = provider.flows_for(stage, center_index, prev, center, next_frame)
    return run_block(prev, center, next_frame, cfg.flow, cfg.fusion, flows)


def log_stage_noise(stage: int, reports: Seq[BlockReport]) -> None:
    if reports:
        sigma = np.mean([report.noise_sigma for report in reports], axis=0)
        logger.debug(f"Stage {stage}: {len(reports)} blocks, mean sigma per plane {np.round(sigma, 5).tolist()}")


def _check_window(frames: List[PackedRawFrame], schedule: StageSchedule) -> None:
    if len(frames) != schedule.window_size:
        raise SequenceLengthError(
            f"{schedule.stages}-stage window needs exactly {schedule.window_size} frames, got {len(frames)}"
        )
    shape = frames[0].data.shape
    for index, frame in enumerate(frames):
        if not isinstance(frame, PackedRawFrame) or frame.data.shape != shape:
            raise DimensionError(f"Window frame {index} does not match packed raw shape {shape}")


def run_window(
    frames: Seq[PackedRawFrame],
    cfg: DenoiseConfig,
    threads: int = 1,
    provider: Optional[FlowProvider] = None,
) -> WindowResult:
    schedule = StageSchedule(cfg.stages)
    frames = list(frames)
    _check_window(frames, schedule)

    provider = provider or FlowProvider(cfg.flow, reuse=cfg.reuse_flows)
    current: Dict[int, PackedRawFrame] = dict(enumerate(frames))
    reports: Dict[int, List[BlockReport]] = {}

    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for stage in range(1, cfg.stages + 1):
            first, last = schedule.output_range(stage)
            centers = list(range(first, last + 1))

            def task(j, stage=stage, inputs=current):
                return block_at(stage, j, inputs[j - 1], inputs[j], inputs[j + 1], cfg, provider)

            if executor is not None:
                stage_reports = list(executor.map(task, centers))
            else:
                stage_reports = [task(j) for j in centers]
            reports[stage] = stage_reports
            current = {j: report.output for j, report in zip(centers, stage_reports)}
            log_stage_noise(stage, stage_reports)
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    return WindowResult(
        output=current[cfg.stages],
        reports=reports,
        pair_alignments=provider.pair_alignments,
    )


def denoise_window(frames: Seq[PackedRawFrame], cfg: Optional[DenoiseConfig] = None, threads: int = 1) -> PackedRawFrame:
    """Denoise the centre of a (2N + 1)-frame window"""
    return run_window(frames, cfg or DenoiseConfig(), threads).output


def denoise_window_reuse_flows(
    frames: Seq[PackedRawFrame], cfg: Optional[DenoiseConfig] = None, threads: int = 1
) -> PackedRawFrame:
    """denoise_window where stages after the first reuse the stage-1 flows.

    Faster, but later stages align with flows estimated on noisier frames.
    """
    cfg = (cfg or DenoiseConfig()).model_copy(update={"reuse_flows": True})
    return run_window(frames, cfg, threads).output


def run_direct_window(
    frames: Seq[PackedRawFrame], cfg: Optional[DenoiseConfig] = None, threads: int = 1
) -> WindowResult:
    """Single-stage fusion of a whole (2N + 1)-frame window.

    Every neighbour is aligned straight to the centre frame, however far away it is,
    and all 2N registered neighbours are fused in one block.
    """
    cfg = cfg or DenoiseConfig()
    schedule = StageSchedule(cfg.stages)
    frames = list(frames)
    _check_window(frames, schedule)

    center_index = cfg.stages
    center = frames[center_index]
    neighbours = [j for j in range(schedule.window_size) if j != center_index]
    provider = FlowProvider(cfg.flow)

    def task(j):
        return register(frames[j], provider.align(center, frames[j]))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            registered = list(executor.map(task, neighbours))
    else:
        registered = [task(j) for j in neighbours]

    for j, (_, mask) in zip(neighbours, registered):
        logger.debug(f"Neighbour at distance {abs(j - center_index)}: mean validity {float(np.mean(mask.data)):.3f}")

    report = fuse_frames_report(
        center,
        [aligned for aligned, _ in registered],
        [mask for _, mask in registered],
        cfg.fusion,
    )
    return WindowResult(output=report.output, reports={1: [report]}, pair_alignments=provider.pair_alignments)


def denoise_window_direct(
    frames: Seq[PackedRawFrame], cfg: Optional[DenoiseConfig] = None, threads: int = 1
) -> PackedRawFrame:
    """One block over all 2N + 1 inputs instead of N stages of 3-frame blocks"""
    return run_direct_window(frames, cfg, threads).output
