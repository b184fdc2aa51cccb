import logging
from pathlib import Path
from typing import Iterable, List

from ravden.errors import ConfigError
from ravden.utils.utils import UtilityHelper

logger = logging.getLogger(__name__)


class InputValidator:
    """Checks paths and flag combinations before a command starts any work"""

    def __init__(self, command: str):
        self.command = command

    def require_dir(self, dir_path, suffixes: Iterable[str], minimum: int = 1) -> List[Path]:
        """Frames of an input directory; a missing or short directory is a usage error"""
        path = Path(dir_path)
        if not path.is_dir():
            raise ConfigError(f"{self.command}: input directory not found: {dir_path}")
        suffixes = list(suffixes)
        frames = UtilityHelper.list_frames(path, suffixes)
        if not frames:
            raise ConfigError(f"{self.command}: no {'/'.join(suffixes)} frames in {dir_path}")
        if len(frames) < minimum:
            raise ConfigError(
                f"{self.command}: need at least {minimum} frames in {dir_path}, found {len(frames)}"
            )
        logger.debug(f"{self.command}: {len(frames)} frames in {dir_path}")
        return frames

    def require_file(self, file_path) -> Path:
        path = Path(file_path)
        if not path.is_file():
            raise ConfigError(f"{self.command}: input file not found: {file_path}")
        return path

    def require_suffix(self, file_path, suffixes: Iterable[str]) -> Path:
        path = Path(file_path)
        allowed = [suffix.lower() for suffix in suffixes]
        if path.suffix.lower() not in allowed:
            raise ConfigError(f"{self.command}: {file_path} must end in one of {allowed}")
        return path

    def output_file(self, file_path) -> Path:
        """Make sure the parent directory of an output file exists"""
        path = Path(file_path)
        UtilityHelper.create_directory(path.parent if str(path.parent) else ".")
        return path
