"""
CSV storage for experiment artifacts: records, heatmaps, matrices and report rows.

Numbers are written in full-precision scientific notation (exact zero as
"0"), rows end with "\\n", and every file is stable under write -> read -> write.
"""

import csv
import logging
import os

import numpy as np

from models.experiment import ExperimentRecord, HeatmapMatrix
from utils.error_handler import StorageError, ValidationError
from utils.helpers import format_bool, format_float, parse_bool, parse_float

logger = logging.getLogger(__name__)

RECORD_FIELDS = ['rule', 'delta_rel', 'eta_rel', 'realization', 'alpha_star', 'fallback',
                 'e_rel', 'e_opt', 'e_per', 'status']
HEATMAP_CORNER = 'delta/eta'


def _format_cell(value):
    if isinstance(value, bool):
        return format_bool(value)
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if hasattr(value, 'value'):
        return str(value.value)
    return str(value)


def _write_rows(path, rows):
    try:
        directory = os.path.dirname(os.fspath(path))
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerows(rows)
    except OSError as e:
        raise StorageError(f"Failed to write {path}: {e.strerror or e}", path)
    logger.debug(f"Wrote {len(rows)} rows to {path}")


def _read_rows(path):
    try:
        with open(path, 'r', encoding='utf-8', newline='') as f:
            return list(csv.reader(f))
    except OSError as e:
        raise StorageError(f"Failed to read {path}: {e.strerror or e}", path)


def write_records_csv(records, path):
    """One row per record, sorted by (rule, delta, eta, realization)"""
    rows = [RECORD_FIELDS]
    for record in sorted(records, key=lambda r: r.sort_key):
        rows.append([
            record.rule,
            format_float(record.delta_rel),
            format_float(record.eta_rel),
            str(record.realization),
            format_float(record.alpha_star),
            format_bool(record.fallback),
            format_float(record.e_rel),
            format_float(record.e_opt),
            format_float(record.e_per),
            record.status,
        ])
    _write_rows(path, rows)


def read_records_csv(path):
    rows = _read_rows(path)
    if not rows or rows[0] != RECORD_FIELDS:
        raise ValidationError(f"{path} is not a records file", {'header': rows[0] if rows else None})

    records = []
    for line_number, row in enumerate(rows[1:], start=2):
        if len(row) != len(RECORD_FIELDS):
            raise ValidationError(f"{path}:{line_number}: expected {len(RECORD_FIELDS)} fields, got {len(row)}")
        try:
            records.append(ExperimentRecord(
                rule=row[0],
                delta_rel=parse_float(row[1]),
                eta_rel=parse_float(row[2]),
                realization=int(row[3]),
                alpha_star=parse_float(row[4]),
                fallback=parse_bool(row[5]),
                e_rel=parse_float(row[6]),
                e_opt=parse_float(row[7]),
                e_per=parse_float(row[8]),
                status=row[9],
            ))
        except ValueError as e:
            raise ValidationError(f"{path}:{line_number}: {e}")
    return records


def write_heatmap_csv(matrix, path):
    """First row holds the eta levels, first column the delta levels"""
    rows = [[HEATMAP_CORNER] + [format_float(e) for e in matrix.eta_levels]]
    for delta, cells in zip(matrix.delta_levels, matrix.cells):
        rows.append([format_float(delta)] + [format_float(c) for c in cells])
    _write_rows(path, rows)


def read_heatmap_csv(path, standard_id='', modified_id=''):
    rows = _read_rows(path)
    if not rows or not rows[0] or rows[0][0] != HEATMAP_CORNER:
        raise ValidationError(f"{path} is not a heatmap file")
    try:
        eta_levels = [parse_float(v) for v in rows[0][1:]]
        delta_levels = [parse_float(row[0]) for row in rows[1:]]
        cells = [[parse_float(v) for v in row[1:]] for row in rows[1:]]
    except ValueError as e:
        raise ValidationError(f"{path}: {e}")
    if any(len(row) != len(eta_levels) for row in cells):
        raise ValidationError(f"{path}: ragged heatmap")
    return HeatmapMatrix(tuple(delta_levels), tuple(eta_levels),
                         np.array(cells).reshape(len(delta_levels), len(eta_levels)),
                         standard_id, modified_id)


def write_matrix_csv(array, path):
    """Matrix (row-major) or vector (one value per line)"""
    array = np.asarray(array, dtype=float)
    if array.ndim == 1:
        array = array[:, None]
    _write_rows(path, [[format_float(v) for v in row] for row in array])


def read_matrix_csv(path):
    try:
        return np.array([[parse_float(v) for v in row] for row in _read_rows(path)], dtype=float)
    except ValueError as e:
        raise ValidationError(f"{path}: {e}")


def write_report_csv(rows, path, fieldnames=None):
    """Rows of dicts (e.g. report.to_rows()) with a header line"""
    rows = list(rows)
    fieldnames = fieldnames or (list(rows[0]) if rows else [])
    _write_rows(path, [fieldnames] + [[_format_cell(row[name]) for name in fieldnames] for row in rows])


class CsvStorage:
    """Output directory of one command, laid out by artifact name"""

    def __init__(self, out_dir):
        self.out_dir = os.fspath(out_dir)
        self.ensure_out_dir()

    def ensure_out_dir(self):
        try:
            os.makedirs(self.out_dir, exist_ok=True)
        except OSError as e:
            raise StorageError(f"Cannot create output directory: {e.strerror or e}", self.out_dir)

    def get_file_path(self, name):
        return os.path.join(self.out_dir, name)

    def save_records(self, records, name='records.csv'):
        path = self.get_file_path(name)
        write_records_csv(records, path)
        return path

    def save_heatmap(self, matrix):
        path = self.get_file_path(f"heatmap_{matrix.standard_id}_vs_{matrix.modified_id}.csv")
        write_heatmap_csv(matrix, path)
        return path

    def save_matrix(self, array, name):
        path = self.get_file_path(name)
        write_matrix_csv(array, path)
        return path

    def save_rows(self, rows, name, fieldnames=None):
        path = self.get_file_path(name)
        write_report_csv(rows, path, fieldnames)
        return path
