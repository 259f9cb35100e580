"""
Regularisation lab - command-line entry point
"""

import logging
import os
from logging.handlers import RotatingFileHandler

import click
from pythonjsonlogger import jsonlogger

from commands import register_commands
from config import get_config

TEXT_FORMAT = '%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]'
JSON_FORMAT = '%(asctime)s %(levelname)s %(name)s %(message)s'


def _formatter(fmt):
    if fmt == 'json':
        return jsonlogger.JsonFormatter(JSON_FORMAT)
    return logging.Formatter(TEXT_FORMAT)


def configure_logging(level='INFO', fmt='text', log_file=None):
    """Attach one handler to the root logger; a file handler when possible"""
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, '_regulab', False):
            root.removeHandler(handler)

    handler = None
    if log_file:
        try:
            directory = os.path.dirname(log_file)
            if directory:
                os.makedirs(directory, exist_ok=True)
            handler = RotatingFileHandler(log_file, maxBytes=1024 * 1024, backupCount=10)
        except OSError:
            # Fallback to stream handler if the file system is read-only
            handler = None
    if handler is None:
        handler = logging.StreamHandler()

    handler.setFormatter(_formatter(fmt))
    handler.setLevel(level)
    handler._regulab = True
    root.addHandler(handler)
    root.setLevel(level)
    logging.getLogger('matplotlib').setLevel(logging.WARNING)
    return handler


@click.group()
@click.option('--env', 'env_name', type=click.Choice(['development', 'full', 'testing', 'default']),
              default=None, help='Configuration profile (defaults to REGULAB_ENV).')
@click.option('--log-level', default=None, help='Overrides LOG_LEVEL.')
@click.option('--log-format', type=click.Choice(['text', 'json']), default=None, help='Overrides LOG_FORMAT.')
@click.pass_context
def cli(ctx, env_name, log_level, log_format):
    """Tikhonov regularisation with heuristic and semi-heuristic parameter choice."""
    config_class = get_config(env_name)
    configure_logging(
        (log_level or config_class.LOG_LEVEL).upper(),
        log_format or config_class.LOG_FORMAT,
        config_class.LOG_FILE,
    )
    ctx.ensure_object(dict)
    ctx.obj['config'] = config_class
    logging.getLogger(__name__).debug(f"regulab startup ({config_class.__name__})")


register_commands(cli)


if __name__ == '__main__':
    cli()
