"""
Decorators for timing and logging numerical operations
"""

import logging
import time
from functools import wraps


def timed(label=None):
    """Log the wall-clock duration of the wrapped call at DEBUG level"""
    def decorator(f):
        logger = logging.getLogger(f.__module__)
        name = label or f.__name__

        @wraps(f)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                return f(*args, **kwargs)
            finally:
                logger.debug(f"{name} finished in {time.perf_counter() - start:.3f}s")
        return wrapper
    return decorator
