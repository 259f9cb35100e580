"""
Centralized error handling system for the regularisation lab
"""
import logging
import sys
from functools import wraps

import click
import numpy as np

logger = logging.getLogger(__name__)


class RegulabError(Exception):
    """Base error class"""
    def __init__(self, message, exit_code=1, error_code=None, details=None):
        super().__init__(message)
        self.message = message
        self.exit_code = exit_code
        self.error_code = error_code
        self.details = details or {}


class ValidationError(RegulabError):
    """Invalid input or violated precondition"""
    def __init__(self, message, details=None):
        super().__init__(message, 3, "VALIDATION_ERROR", details)


class ConfigError(RegulabError):
    """Configuration document could not be parsed or validated"""
    def __init__(self, message, details=None):
        super().__init__(message, 3, "CONFIG_ERROR", details)


class NumericError(RegulabError):
    """Fatal numerical failure (non-convergence, corrupted values)"""
    def __init__(self, message, details=None):
        super().__init__(message, 4, "NUMERIC_ERROR", details)


class PreconditionError(RegulabError):
    """A theory check was called outside the hypotheses it verifies"""
    def __init__(self, message, details=None):
        super().__init__(message, 4, "PRECONDITION_ERROR", details)


class PairingError(RegulabError):
    """Standard and modified records cannot be paired"""
    def __init__(self, message, details=None):
        super().__init__(message, 4, "PAIRING_ERROR", details)


class CheckFailedError(RegulabError):
    """A verified inequality does not hold"""
    def __init__(self, message, details=None):
        super().__init__(message, 2, "CHECK_FAILED", details)


class StorageError(RegulabError):
    """Reading or writing an artifact failed"""
    def __init__(self, message, path=None):
        super().__init__(message, 5, "IO_ERROR", {"path": str(path) if path else None})


def handle_regulab_error(error):
    """Report a known error and return its exit code"""
    logger.error(f"{error.error_code}: {error.message}", extra={"details": error.details})
    click.echo(f"error [{error.error_code}]: {error.message}", err=True)
    return error.exit_code


def handle_generic_error(error):
    """Report an unexpected exception and return exit code 1"""
    error_type = type(error).__name__
    logger.error(f"Unhandled error: {error_type} - {error}", exc_info=True)
    click.echo(f"error [INTERNAL_ERROR]: {error_type}: {error}", err=True)
    return 1


def error_handler(f):
    """Decorator mapping exceptions in CLI commands to exit codes"""
    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except RegulabError as e:
            sys.exit(handle_regulab_error(e))
        except np.linalg.LinAlgError as e:
            sys.exit(handle_regulab_error(NumericError(str(e))))
        except click.exceptions.Exit:
            raise
        except click.ClickException:
            raise
        except Exception as e:
            sys.exit(handle_generic_error(e))
    return decorated_function
