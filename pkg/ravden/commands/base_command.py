import argparse
import logging
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict

from ravden.errors import OutputError
from ravden.mlops.mlflow_manager import MLflowManager
from ravden.settings import RunConfig
from ravden.utils.validation import InputValidator

logger = logging.getLogger(__name__)


def on_off(value: str) -> bool:
    lowered = value.lower()
    if lowered not in ("on", "off"):
        raise argparse.ArgumentTypeError(f"expected 'on' or 'off', got {value!r}")
    return lowered == "on"


class BaseCommand(ABC):
    """Abstract base class for all subcommands"""

    name = "base"
    help = "Generic subcommand"

    def __init__(self, config: RunConfig):
        self.config = config
        self.validator = InputValidator(self.name)

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        """Register subcommand arguments - overridden by subcommands with flags"""

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> Dict[str, Any]:
        """Dotted config keys set by this subcommand's flags"""
        return {}

    @abstractmethod
    def execute(self, args: argparse.Namespace) -> None:
        """Run the subcommand; failures are raised as ravden errors"""

    def write(self, writer: Callable[..., None], path, *payload) -> None:
        """Call a file writer, reporting filesystem failures as OutputError"""
        try:
            writer(path, *payload)
        except OSError as e:
            raise OutputError(f"Cannot write {path}: {e}") from e

    def track(self, parameters: Dict[str, Any], metrics: Dict[str, float]) -> None:
        tracking = self.config.mlops
        if not tracking.enabled:
            return
        manager = MLflowManager(tracking.tracking_uri, tracking.experiment_name)
        manager.log_run(self.name, parameters, metrics)
