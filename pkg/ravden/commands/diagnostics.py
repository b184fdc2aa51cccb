"""
Thin subcommands over single library operations: mask, flow, isp, unprocess.
"""

import argparse
import logging
from pathlib import Path
from typing import Any, Dict

from ravden.align.flow import estimate_flow, endpoint_error
from ravden.camera.isp import process_isp, unprocess
from ravden.commands.base_command import BaseCommand
from ravden.errors import ConfigError
from ravden.frames.color import guide_plane
from ravden.frames.io import load_flow, load_image, load_raw, save_flow, save_image, save_raw, write_pnm
from ravden.frames.types import ColorSpace, Frame
from ravden.fusion.fuse import flow_guide
from ravden.quality.mask import DEFAULT_MASK_ALPHA, gradient_mask
from ravden.utils.utils import UtilityHelper

logger = logging.getLogger(__name__)


def load_guide(path: Path) -> Frame:
    """Single-plane alignment guide: green mean for RPF1 raw, luma for images"""
    if path.suffix.lower() == ".rpf":
        return flow_guide(load_raw(path))
    return Frame.from_plane(guide_plane(load_image(path)), ColorSpace.LINEAR)


class MaskCommand(BaseCommand):
    name = "mask"
    help = "write the gradient texture mask of an sRGB frame as a 16-bit PGM"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("input", help="sRGB frame")
        parser.add_argument("output", help="output .pgm")
        parser.add_argument("--alpha", type=float, default=DEFAULT_MASK_ALPHA, help="mask normaliser")

    def execute(self, args: argparse.Namespace) -> None:
        if args.alpha <= 0.0:
            raise ConfigError(f"--alpha must be positive, got {args.alpha}")
        source = self.validator.require_file(args.input)
        output = self.validator.output_file(self.validator.require_suffix(args.output, (".pgm",)))
        mask = gradient_mask(load_image(source), args.alpha)
        self.write(write_pnm, output, Frame.from_plane(mask.data), 16)


class FlowCommand(BaseCommand):
    name = "flow"
    help = "estimate dense flow from a reference to a target frame"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("reference", help="reference frame (image or .rpf)")
        parser.add_argument("target", help="target frame aligned onto the reference")
        parser.add_argument("output", help="output .flo")
        parser.add_argument("--iterations-dir", help="also write every refinement pass as .flo")
        parser.add_argument("--truth", help="ground-truth .flo; prints the mean endpoint error")
        parser.add_argument("--window", type=int)
        parser.add_argument("--iters-per-level", type=int)
        parser.add_argument("--pyramid-levels", type=int)

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> Dict[str, Any]:
        return {
            "denoise.flow.window": args.window,
            "denoise.flow.iters_per_level": args.iters_per_level,
            "denoise.flow.pyramid_levels": args.pyramid_levels,
        }

    def execute(self, args: argparse.Namespace) -> None:
        reference = load_guide(self.validator.require_file(args.reference))
        target = load_guide(self.validator.require_file(args.target))
        truth = None
        if args.truth:
            truth = load_flow(self.validator.require_suffix(self.validator.require_file(args.truth), (".flo",)))
        output = self.validator.output_file(self.validator.require_suffix(args.output, (".flo",)))

        result = estimate_flow(reference, target, self.config.denoise.flow)
        self.write(save_flow, output, result.final)

        if args.iterations_dir:
            iterations_dir = UtilityHelper.create_directory(args.iterations_dir)
            for index, flow in enumerate(result.iterations):
                self.write(save_flow, iterations_dir / f"iter_{index:03d}.flo", flow)

        if truth is not None:
            epe = endpoint_error(result.final, truth)
            print(f"mean endpoint error: {epe:.6f} px")
        if result.flat:
            logger.warning("Flow inputs are flat; wrote zero flow")


class IspCommand(BaseCommand):
    name = "isp"
    help = "render an RPF1 raw frame to sRGB"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("input", help="RPF1 raw frame")
        parser.add_argument("output", help="output image (.ppm for 16-bit, other suffixes via Pillow)")

    def execute(self, args: argparse.Namespace) -> None:
        packed = load_raw(self.validator.require_file(args.input))
        output = self.validator.output_file(args.output)
        self.write(save_image, output, process_isp(packed, self.config.isp), self.config.srgb_bit_depth)


class UnprocessCommand(BaseCommand):
    name = "unprocess"
    help = "invert the camera pipeline of an sRGB frame into RPF1 raw"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("input", help="sRGB frame")
        parser.add_argument("output", help="output .rpf")

    def execute(self, args: argparse.Namespace) -> None:
        frame = load_image(self.validator.require_file(args.input))
        output = self.validator.output_file(args.output)
        self.write(save_raw, output, unprocess(frame, self.config.isp))
