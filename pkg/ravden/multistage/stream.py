"""
Streaming evaluation: every pushed frame runs at most one new block per stage,
so a steady-state output costs N blocks instead of the N^2 of a fresh window.
"""

import logging
from collections import deque
from typing import Deque, List, Optional, Tuple

from ravden.errors import DimensionError
from ravden.frames.types import PackedRawFrame, Sequence
from ravden.multistage.denoiser import FlowProvider, block_at
from ravden.multistage.schedule import DenoiseConfig, StageSchedule

logger = logging.getLogger(__name__)

Entry = Tuple[int, PackedRawFrame]


class StreamDenoiser:
    """Single-owner sliding-window state; not safe to share between threads"""

    def __init__(self, cfg: Optional[DenoiseConfig] = None):
        self.cfg = cfg or DenoiseConfig()
        self.schedule = StageSchedule(self.cfg.stages)
        self.provider = FlowProvider(self.cfg.flow, reuse=self.cfg.reuse_flows)
        # buffers[0] holds inputs, buffers[i] holds stage-i outputs
        self.buffers: List[Deque[Entry]] = [deque(maxlen=3) for _ in range(self.cfg.stages + 1)]
        self.frames_consumed = 0
        self.blocks = 0
        self._shape = None

    def push(self, frame: PackedRawFrame) -> Optional[Entry]:
        """Feed the next frame; returns (frame index, denoised frame) once one is ready"""
        if self._shape is None:
            self._shape = frame.data.shape
        elif frame.data.shape != self._shape:
            raise DimensionError(f"Stream frame {frame.data.shape} does not match {self._shape}")

        self.buffers[0].append((self.frames_consumed, frame))
        self.frames_consumed += 1

        # each stage gains at most one entry per push, so it runs only when the
        # stage below it just filled a new triple
        for stage in range(1, self.cfg.stages + 1):
            source = self.buffers[stage - 1]
            if len(source) < 3:
                return None
            (_, prev), (center_index, center), (_, next_frame) = source
            report = block_at(stage, center_index, prev, center, next_frame, self.cfg, self.provider)
            self.blocks += 1
            self.buffers[stage].append((center_index, report.output))

        index, output = self.buffers[self.cfg.stages][-1]
        if self.provider.reuse:
            self.provider.evict_through(index)
        return index, output


def denoise_stream(sequence: Sequence, cfg: Optional[DenoiseConfig] = None) -> Sequence:
    """Denoise every frame index in [N, L - 1 - N] with the incremental schedule"""
    cfg = cfg or DenoiseConfig()
    StageSchedule(cfg.stages).check_length(len(sequence))

    streamer = StreamDenoiser(cfg)
    outputs: List[PackedRawFrame] = []
    metadata = []
    for frame in sequence:
        emitted = streamer.push(frame)
        if emitted is not None:
            index, output = emitted
            outputs.append(output)
            metadata.append({**sequence.metadata[index], "frame_index": index})

    logger.info(
        f"Streamed {len(sequence)} frames through {cfg.stages} stages: "
        f"{len(outputs)} outputs, {streamer.blocks} blocks, "
        f"{streamer.provider.pair_alignments} pair alignments"
    )
    return Sequence(outputs, frame_rate=sequence.frame_rate, metadata=metadata)
