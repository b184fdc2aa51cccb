import argparse
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ravden.camera.isp import process_isp
from ravden.commands.base_command import BaseCommand
from ravden.errors import ConfigError
from ravden.frames.io import load_raw
from ravden.frames.types import Sequence
from ravden.quality.metrics import psnr, ssim
from ravden.quality.temporal import temporal_warping_error

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["frame_index", "psnr_raw", "psnr_srgb", "ssim_srgb", "warping_error"]


def _mean(values: List[float]) -> float:
    """Arithmetic mean that keeps +inf when any frame is a perfect match"""
    if any(math.isinf(value) for value in values):
        return math.inf
    return float(np.mean(values))


def consecutive_runs(positions: List[int]) -> List[List[int]]:
    """Split row indices into runs whose clean-sequence positions step by exactly one"""
    runs: List[List[int]] = []
    for row, position in enumerate(positions):
        if runs and position == positions[runs[-1][-1]] + 1:
            runs[-1].append(row)
        else:
            runs.append([row])
    return runs


class EvaluateCommand(BaseCommand):
    """Per-frame PSNR/SSIM and sequence warping error of denoised raw frames"""

    name = "eval"
    help = "score denoised RPF1 frames against clean ground truth"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("denoised_dir", help="directory of denoised RPF1 frames")
        parser.add_argument("clean_dir", help="directory of clean RPF1 frames with matching names")
        parser.add_argument("out_csv", help="CSV report path")

    def execute(self, args: argparse.Namespace) -> None:
        denoised_paths = self.validator.require_dir(args.denoised_dir, (".rpf",))
        clean_paths = self.validator.require_dir(args.clean_dir, (".rpf",))
        positions = {path.name: index for index, path in enumerate(clean_paths)}
        missing = [path.name for path in denoised_paths if path.name not in positions]
        if missing:
            raise ConfigError(f"No clean counterpart in {args.clean_dir} for {missing}")
        out_csv = self.validator.output_file(args.out_csv)

        def score(path: Path) -> Dict[str, Any]:
            denoised = load_raw(path)
            clean = load_raw(Path(args.clean_dir) / path.name)
            denoised_srgb = process_isp(denoised, self.config.isp)
            clean_srgb = process_isp(clean, self.config.isp)
            return {
                "frame_index": positions[path.name],
                "psnr_raw": psnr(denoised, clean),
                "psnr_srgb": psnr(denoised_srgb, clean_srgb),
                "ssim_srgb": ssim(denoised_srgb, clean_srgb),
                "warping_error": None,
                "_srgb": (denoised_srgb, clean_srgb),
            }

        with ThreadPoolExecutor(max_workers=self.config.threads) as executor:
            rows = list(executor.map(score, denoised_paths))

        warping_error = self.sequence_warping_error(rows)

        summary = {
            "frame_index": "mean",
            "psnr_raw": _mean([row["psnr_raw"] for row in rows]),
            "psnr_srgb": _mean([row["psnr_srgb"] for row in rows]),
            "ssim_srgb": float(np.mean([row["ssim_srgb"] for row in rows])),
            "warping_error": warping_error,
        }
        report = pd.DataFrame(rows + [summary], columns=CSV_COLUMNS)
        self.write(lambda path: report.to_csv(path, index=False, na_rep=""), out_csv)

        logger.info(
            f"Evaluated {len(rows)} frames: PSNR raw {summary['psnr_raw']:.3f} dB, "
            f"sRGB {summary['psnr_srgb']:.3f} dB, SSIM {summary['ssim_srgb']:.4f}"
        )
        self.track(
            parameters={"frames": len(rows), "denoised_dir": args.denoised_dir},
            metrics={
                "psnr_raw": summary["psnr_raw"],
                "psnr_srgb": summary["psnr_srgb"],
                "ssim_srgb": summary["ssim_srgb"],
                "warping_error": warping_error,
            },
        )

    def sequence_warping_error(self, rows: List[Dict[str, Any]]) -> Optional[float]:
        """E_w within each run of consecutive frames, weighted by the pairs each run contributes"""
        runs = consecutive_runs([row["frame_index"] for row in rows])
        if len(runs) > 1:
            logger.warning(
                f"Denoised frames are not consecutive in the clean sequence ({len(runs)} runs); "
                f"warping error only pairs neighbours within a run"
            )

        errors, weights = [], []
        for run in runs:
            if len(run) < 3:
                continue
            denoised_seq = Sequence([rows[index]["_srgb"][0] for index in run])
            clean_seq = Sequence([rows[index]["_srgb"][1] for index in run])
            errors.append(temporal_warping_error(denoised_seq, clean_seq, self.config.denoise.flow, self.config.threads))
            weights.append(2 * (len(run) - 2))

        if not errors:
            logger.warning("Warping error needs a run of at least 3 consecutive frames; column left empty")
            return None
        return float(np.average(errors, weights=weights))
