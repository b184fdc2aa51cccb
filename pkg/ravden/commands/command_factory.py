import argparse
import logging
from typing import Dict, List, Type

from ravden.commands.base_command import BaseCommand
from ravden.commands.denoise import DenoiseCommand
from ravden.commands.diagnostics import FlowCommand, IspCommand, MaskCommand, UnprocessCommand
from ravden.commands.evaluate import EvaluateCommand
from ravden.commands.synth import SynthCommand
from ravden.settings import RunConfig

logger = logging.getLogger(__name__)


class CommandFactory:
    """Factory class for creating subcommands by name"""

    def __init__(self):
        self.command_registry: Dict[str, Type[BaseCommand]] = {
            command.name: command
            for command in (
                SynthCommand,
                DenoiseCommand,
                EvaluateCommand,
                MaskCommand,
                FlowCommand,
                IspCommand,
                UnprocessCommand,
            )
        }

    def get_command_class(self, command_name: str) -> Type[BaseCommand]:
        if command_name not in self.command_registry:
            raise ValueError(f"Unknown command: {command_name}. Available: {self.get_available_commands()}")
        return self.command_registry[command_name]

    def create_command(self, command_name: str, config: RunConfig) -> BaseCommand:
        """Create a subcommand bound to the effective run configuration"""
        return self.get_command_class(command_name)(config)

    def get_available_commands(self) -> List[str]:
        return list(self.command_registry.keys())

    def register_parsers(self, subparsers: "argparse._SubParsersAction") -> None:
        for name, command in self.command_registry.items():
            parser = subparsers.add_parser(name, help=command.help, description=command.__doc__)
            command.add_arguments(parser)
