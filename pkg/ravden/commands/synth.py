import argparse
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict

from ravden.camera.isp import unprocess
from ravden.camera.noise import NoiseParams, NoiseSeed, add_noise, iso_preset, write_noise_sidecar
from ravden.commands.base_command import BaseCommand
from ravden.errors import ConfigError
from ravden.frames.io import load_image, save_raw
from ravden.utils.utils import UtilityHelper

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".pnm", ".ppm", ".pgm", ".png", ".tif", ".tiff", ".bmp", ".jpg", ".jpeg")


class SynthCommand(BaseCommand):
    """Clean sRGB frames -> noisy and clean packed raw frames plus noise sidecars"""

    name = "synth"
    help = "synthesize noisy raw frames from clean sRGB frames"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("clean_srgb_dir", help="directory of clean sRGB frames")
        parser.add_argument("out_dir", help="output directory (noisy/ and clean/ are created)")
        parser.add_argument("--iso", help="noise preset iso1..iso5")
        parser.add_argument("--sigma-s-sq", "--sigma_s_sq", dest="sigma_s_sq", type=float,
                            help="shot noise variance scale")
        parser.add_argument("--sigma-r", "--sigma_r", dest="sigma_r", type=float,
                            help="read noise standard deviation")
        parser.add_argument("--seed", type=int, help="noise seed")

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> Dict[str, Any]:
        return {"seed": args.seed, "iso": args.iso}

    def noise_params(self, args: argparse.Namespace) -> NoiseParams:
        explicit = (args.sigma_s_sq, args.sigma_r)
        if any(value is not None for value in explicit):
            if None in explicit:
                raise ConfigError("--sigma-s-sq and --sigma-r must be given together")
            if args.iso:
                raise ConfigError("--iso cannot be combined with --sigma-s-sq/--sigma-r")
            return NoiseParams(sigma_s_sq=args.sigma_s_sq, sigma_r=args.sigma_r)
        if not self.config.iso:
            raise ConfigError("synth needs --iso or both --sigma-s-sq and --sigma-r")
        return iso_preset(self.config.iso, self.config.iso_presets)

    def execute(self, args: argparse.Namespace) -> None:
        try:
            params = self.noise_params(args)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        sources = self.validator.require_dir(args.clean_srgb_dir, IMAGE_SUFFIXES)
        noisy_dir = UtilityHelper.create_directory(Path(args.out_dir) / "noisy")
        clean_dir = UtilityHelper.create_directory(Path(args.out_dir) / "clean")

        def synthesize(item):
            index, source = item
            clean = unprocess(load_image(source), self.config.isp)
            seed = NoiseSeed(seed=self.config.seed, frame_index=index)
            noisy = add_noise(clean, params, seed)
            name = f"{source.stem}.rpf"
            self.write(save_raw, clean_dir / name, clean)
            self.write(save_raw, noisy_dir / name, noisy)
            self.write(write_noise_sidecar, noisy_dir / f"{source.stem}.noise.txt", params, seed)
            return name

        # every draw is keyed by frame index, so worker count never changes the output
        with ThreadPoolExecutor(max_workers=self.config.threads) as executor:
            written = list(executor.map(synthesize, enumerate(sources)))

        logger.info(
            f"Synthesized {len(written)} frames into {args.out_dir} "
            f"(sigma_s_sq={params.sigma_s_sq}, sigma_r={params.sigma_r}, seed={self.config.seed})"
        )
