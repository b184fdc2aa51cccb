import argparse
import logging
import time
from pathlib import Path
from typing import Any, Dict

import numpy as np

from ravden.camera.isp import process_isp
from ravden.commands.base_command import BaseCommand, on_off
from ravden.errors import SequenceLengthError
from ravden.frames.io import load_raw, save_image, save_raw
from ravden.multistage.schedule import StageSchedule
from ravden.multistage.stream import StreamDenoiser
from ravden.utils.utils import UtilityHelper

logger = logging.getLogger(__name__)


class DenoiseCommand(BaseCommand):
    """Stream a directory of packed raw frames through the N-stage denoiser"""

    name = "denoise"
    help = "denoise a directory of RPF1 raw frames"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("raw_dir", help="directory of RPF1 frames, processed in filename order")
        parser.add_argument("--out", dest="out_dir", required=True, help="output directory")
        parser.add_argument("--stages", type=int, help="number of stages N (window of 2N+1 frames)")
        parser.add_argument("--reuse-flows", action="store_const", const=True, default=None,
                            help="later stages reuse stage-1 flows")
        parser.add_argument("--spatial-filter", type=on_off, metavar="on|off",
                            help="light spatial filter after fusion")
        parser.add_argument("--spatial-filter-strength", type=float)
        parser.add_argument("--bandwidth-scale", type=float, help="fusion bandwidth as a multiple of noise sigma")
        parser.add_argument("--residual-box", type=int, help="odd box size for fusion residuals")
        parser.add_argument("--window", type=int, help="odd flow window size")
        parser.add_argument("--iters-per-level", type=int)
        parser.add_argument("--pyramid-levels", type=int)
        parser.add_argument("--srgb", action="store_true", help="also write sRGB renders")

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> Dict[str, Any]:
        return {
            "denoise.stages": args.stages,
            "denoise.reuse_flows": args.reuse_flows,
            "denoise.fusion.spatial_filter": args.spatial_filter,
            "denoise.fusion.spatial_filter_strength": args.spatial_filter_strength,
            "denoise.fusion.bandwidth_scale": args.bandwidth_scale,
            "denoise.fusion.residual_box": args.residual_box,
            "denoise.flow.window": args.window,
            "denoise.flow.iters_per_level": args.iters_per_level,
            "denoise.flow.pyramid_levels": args.pyramid_levels,
        }

    def execute(self, args: argparse.Namespace) -> None:
        cfg = self.config.denoise
        schedule = StageSchedule(cfg.stages)
        sources = self.validator.require_dir(args.raw_dir, (".rpf",))
        try:
            schedule.check_length(len(sources))
        except SequenceLengthError as e:
            raise SequenceLengthError(f"{args.raw_dir}: {e}") from e
        out_dir = UtilityHelper.create_directory(args.out_dir)

        streamer = StreamDenoiser(cfg)
        timings = []
        block_counts = []
        for source in sources:
            frame = load_raw(source)
            blocks_before = streamer.blocks
            started = time.perf_counter()
            emitted = streamer.push(frame)
            elapsed = time.perf_counter() - started
            if emitted is None:
                continue

            index, output = emitted
            blocks = streamer.blocks - blocks_before
            name = sources[index].name
            self.write(save_raw, out_dir / name, output)
            if args.srgb:
                render = process_isp(output, self.config.isp)
                self.write(save_image, out_dir / f"{Path(name).stem}.ppm", render, self.config.srgb_bit_depth)

            timings.append(elapsed)
            block_counts.append(blocks)
            print(f"frame {index} ({name}): {elapsed:.3f} s, {blocks} blocks")

        logger.info(
            f"Denoised {len(timings)} frames with {cfg.stages} stages: {streamer.blocks} blocks, "
            f"{streamer.provider.pair_alignments} pair alignments"
        )
        self.track(
            parameters={
                "stages": cfg.stages,
                "reuse_flows": cfg.reuse_flows,
                "spatial_filter": cfg.fusion.spatial_filter,
                "bandwidth_scale": cfg.fusion.bandwidth_scale,
                "residual_box": cfg.fusion.residual_box,
                "flow_window": cfg.flow.window,
                "frames_in": len(sources),
            },
            metrics={
                "seconds_per_frame": float(np.mean(timings)),
                "blocks_per_frame": float(np.mean(block_counts)),
                "pair_alignments": float(streamer.provider.pair_alignments),
            },
        )
