"""
Command package initialization
"""

from .generate import gen
from .experiments import run, sweep
from .checks import check
from .plots import plot


def register_commands(cli):
    """Register all subcommands with the click group"""
    cli.add_command(gen)
    cli.add_command(run)
    cli.add_command(sweep)
    cli.add_command(check)
    cli.add_command(plot)
