import logging
from dataclasses import dataclass
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field

from ravden.align.flow import FlowConfig
from ravden.errors import ParameterError, SequenceLengthError
from ravden.fusion.fuse import FusionConfig

logger = logging.getLogger(__name__)

# deeper schedules run but have not been validated for quality
TESTED_MAX_STAGES = 3


class DenoiseConfig(BaseModel):
    """Shared by every stage: one flow and one fusion configuration for all blocks"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    stages: int = Field(default=2, ge=1)
    flow: FlowConfig = Field(default_factory=FlowConfig)
    fusion: FusionConfig = Field(default_factory=FusionConfig)
    reuse_flows: bool = False


@dataclass(frozen=True)
class StageSchedule:
    """Index bookkeeping for an N-stage window of 2N + 1 frames.

    Window indices run 0..2N. Stage i (1-based) consumes [i - 1, 2N - i + 1] and
    emits [i, 2N - i]; stage N emits the single centre frame.
    """

    stages: int

    def __post_init__(self):
        if self.stages < 1:
            raise ParameterError(f"Schedule needs at least one stage, got {self.stages}")
        if self.stages > TESTED_MAX_STAGES:
            logger.warning(f"{self.stages}-stage schedule is beyond the tested range (<= {TESTED_MAX_STAGES})")

    @property
    def window_size(self) -> int:
        return 2 * self.stages + 1

    def _check_stage(self, stage: int) -> None:
        if not 1 <= stage <= self.stages:
            raise ParameterError(f"Stage {stage} outside 1..{self.stages}")

    def input_range(self, stage: int) -> Tuple[int, int]:
        self._check_stage(stage)
        return stage - 1, 2 * self.stages - stage + 1

    def output_range(self, stage: int) -> Tuple[int, int]:
        self._check_stage(stage)
        return stage, 2 * self.stages - stage

    def outputs_at(self, stage: int) -> int:
        first, last = self.output_range(stage)
        return last - first + 1

    @property
    def blocks_per_window(self) -> int:
        return sum(self.outputs_at(stage) for stage in range(1, self.stages + 1))

    @property
    def amortized_blocks_per_frame(self) -> int:
        return self.stages

    def check_length(self, length: int) -> None:
        if length < self.window_size:
            raise SequenceLengthError(
                f"{self.stages}-stage schedule needs at least {self.window_size} frames, got {length}"
            )

    def valid_range(self, length: int) -> range:
        """Frame indices of a length-L sequence that receive an output"""
        self.check_length(length)
        return range(self.stages, length - self.stages)

    def stream_block_count(self, length: int) -> int:
        """Stage blocks a streaming pass over L frames runs: stage i covers L - 2i centres"""
        self.check_length(length)
        return (length - 2) * self.stages - self.stages * (self.stages - 1)
