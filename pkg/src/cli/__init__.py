"""
Command-line interface: run configs and subcommands.
"""

from src.cli.config import RunConfig, load_run_config, parse_overrides
from src.cli.main import build_parser, main

__all__ = ["RunConfig", "load_run_config", "parse_overrides", "build_parser", "main"]
