"""
Helper utilities for common operations
"""

import math

import numpy as np

from utils.error_handler import ValidationError


def format_float(value):
    """Full-precision scientific notation; exact zero is written as "0" """
    value = float(value)
    if value == 0:
        return '0'
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return format(value, '.17e')


def parse_float(text):
    """Inverse of format_float"""
    return float(text)


def format_bool(value):
    return 'true' if value else 'false'


def parse_bool(text):
    text = text.strip().lower()
    if text not in ('true', 'false'):
        raise ValidationError(f"Expected true/false, got {text!r}")
    return text == 'true'


def median(values):
    """Median; an even count averages the two central values"""
    values = np.asarray(list(values), dtype=float)
    if values.size == 0:
        raise ValidationError("Cannot take the median of an empty group")
    return float(np.median(values))


def interior_local_minima(values):
    """Indices i (0 < i < n-1) strictly smaller than both neighbours"""
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        return np.array([], dtype=int)
    centre = values[1:-1]
    mask = (centre < values[:-2]) & (centre < values[2:])
    return np.flatnonzero(mask) + 1


def summarize_records(records):
    """Counts of a record set by status, for log lines and the CLI summary"""
    summary = {'total': 0, 'ok': 0, 'failed': 0, 'fallbacks': 0}
    for record in records:
        summary['total'] += 1
        if record.ok:
            summary['ok'] += 1
            if record.fallback:
                summary['fallbacks'] += 1
        else:
            summary['failed'] += 1
    return summary
