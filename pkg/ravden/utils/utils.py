import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List

import yaml

from ravden.errors import ConfigError, OutputError

logger = logging.getLogger(__name__)


class UtilityHelper:
    """File and configuration helpers shared by the commands"""

    @staticmethod
    def parse_flat_config(text: str) -> Dict[str, Any]:
        """Parse `key = value` lines; '#' starts a comment, dotted keys nest"""
        config: Dict[str, Any] = {}
        for line_no, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"Line {line_no}: expected 'key = value', got {line!r}")
            key, raw_value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ConfigError(f"Line {line_no}: empty key")
            # YAML scalars give ints, floats, booleans and strings the natural way
            value = yaml.safe_load(raw_value) if raw_value else None
            UtilityHelper.set_dotted(config, key, value)
        return config

    @staticmethod
    def set_dotted(config: Dict[str, Any], key: str, value: Any) -> None:
        parts = key.split(".")
        node = config
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"Config key {key!r} conflicts with scalar {part!r}")
            node = child
        node[parts[-1]] = value

    @staticmethod
    def load_config(config_path: str) -> Dict[str, Any]:
        """Load configuration from a YAML, JSON or flat key = value file"""
        path = Path(config_path)

        if not path.is_file():
            raise ConfigError(f"Config file not found: {config_path}")

        try:
            text = path.read_text()
            if path.suffix.lower() in [".yaml", ".yml"]:
                config = yaml.safe_load(text)
            elif path.suffix.lower() == ".json":
                config = json.loads(text)
            else:
                config = UtilityHelper.parse_flat_config(text)
        except (yaml.YAMLError, json.JSONDecodeError, UnicodeDecodeError) as e:
            logger.error(f"Error loading config: {str(e)}")
            raise ConfigError(f"Cannot parse config file {config_path}: {e}") from e

        if config is None:
            return {}
        if not isinstance(config, dict):
            raise ConfigError(f"Config file {config_path} must hold a mapping at the top level")
        return config

    @staticmethod
    def create_directory(dir_path) -> Path:
        """Create directory if it doesn't exist"""
        path = Path(dir_path)
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            logger.error(f"Error creating directory: {str(e)}")
            raise OutputError(f"Cannot create directory {dir_path}: {e}") from e
        return path

    @staticmethod
    def list_frames(dir_path, suffixes: Iterable[str]) -> List[Path]:
        """Files in dir_path with one of the suffixes, in lexicographic filename order"""
        allowed = {suffix.lower() for suffix in suffixes}
        return sorted(
            (path for path in Path(dir_path).iterdir() if path.is_file() and path.suffix.lower() in allowed),
            key=lambda path: path.name,
        )
