"""
Validation utilities for numerical inputs and experiment configuration
"""

import json

import numpy as np
from marshmallow import (
    RAISE, Schema, ValidationError as SchemaValidationError, fields, post_load, validate, validates,
    validates_schema,
)

from config import Config
from utils.error_handler import ConfigError, StorageError, ValidationError


def validate_vector(values, name='vector', length=None):
    """Return `values` as a finite 1-D float array or raise ValidationError"""
    array = np.asarray(values, dtype=float)
    if array.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional", {'shape': list(array.shape)})
    if length is not None and array.size != length:
        raise ValidationError(f"{name} has length {array.size}, expected {length}",
                              {'length': int(array.size), 'expected': int(length)})
    if not np.all(np.isfinite(array)):
        raise ValidationError(f"{name} contains NaN or Inf entries")
    return array


def validate_matrix(values, name='matrix'):
    """Return `values` as a finite 2-D float array (C order) or raise ValidationError"""
    array = np.ascontiguousarray(values, dtype=float)
    if array.ndim != 2:
        raise ValidationError(f"{name} must be two-dimensional", {'shape': list(array.shape)})
    if not np.all(np.isfinite(array)):
        raise ValidationError(f"{name} contains NaN or Inf entries")
    return array


def validate_alpha(alpha):
    """Regularisation parameters must be positive and finite"""
    if not (np.isfinite(alpha) and alpha > 0):
        raise ValidationError("alpha must be positive", {'alpha': float(alpha)})
    return float(alpha)


def validate_levels(levels):
    """Validate relative noise levels"""
    if not levels:
        return False, "At least one level is required"

    for level in levels:
        if not 0 < level < 1:
            return False, f"Levels must lie in (0, 1), got {level}"

    return True, None


def _check_levels(levels):
    ok, message = validate_levels(levels)
    if not ok:
        raise SchemaValidationError(message)


class ExperimentConfigSchema(Schema):
    """Schema of experiment configuration documents (JSON)"""

    class Meta:
        unknown = RAISE
        ordered = True

    problem = fields.String(required=True, validate=validate.OneOf(Config.PROBLEMS))
    n = fields.Integer(load_default=None, allow_none=True, validate=validate.Range(min=2))
    grid_n = fields.Integer(load_default=None, allow_none=True, validate=validate.Range(min=2))
    oversampling = fields.Float(load_default=Config.TOMO_OVERSAMPLING, validate=validate.Range(min=0, min_inclusive=False))
    delta_levels = fields.List(fields.Float(), load_default=lambda: list(Config.DEFAULT_LEVELS))
    eta_levels = fields.List(fields.Float(), load_default=lambda: list(Config.DEFAULT_LEVELS))
    realizations = fields.Integer(load_default=Config.DEFAULT_REALIZATIONS, validate=validate.Range(min=1))
    d_sh1 = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0))
    d_sh2 = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0))
    gamma_factor = fields.Float(load_default=None, allow_none=True,
                                validate=validate.Range(min=0, min_inclusive=False))
    s_exponent = fields.Float(load_default=1.0, validate=validate.Range(min=0, max=1, min_inclusive=False))
    d_scaling = fields.String(load_default='absolute', validate=validate.OneOf(Config.D_SCALINGS))
    grid_count = fields.Integer(load_default=Config.GRID_COUNT, validate=validate.Range(min=2))
    master_seed = fields.Integer(load_default=Config.MASTER_SEED, validate=validate.Range(min=0, max=2 ** 64 - 1))
    noise_mode = fields.String(load_default='grid', validate=validate.OneOf(Config.NOISE_MODES))
    full_size = fields.Boolean(load_default=False, load_only=True)

    @validates('delta_levels')
    def _delta_levels(self, value, **kwargs):
        _check_levels(value)

    @validates('eta_levels')
    def _eta_levels(self, value, **kwargs):
        _check_levels(value)

    @validates_schema
    def _sampled_needs_range(self, data, **kwargs):
        if data.get('noise_mode') == 'sampled':
            for key in ('delta_levels', 'eta_levels'):
                if len(data.get(key) or []) < 1:
                    raise SchemaValidationError("sampled mode needs a level range", key)

    @post_load
    def _apply_defaults(self, data, **kwargs):
        from config import FullSizeConfig
        from models.experiment import ExperimentConfig

        sizes = FullSizeConfig if data.pop('full_size', False) else Config
        defaults = Config.RULE_DEFAULTS[data['problem']]
        for key, value in defaults.items():
            if data.get(key) is None:
                data[key] = value
        if data.get('n') is None:
            data['n'] = sizes.BAART_N
        if data.get('grid_n') is None:
            data['grid_n'] = sizes.GRID_N
        data['delta_levels'] = tuple(data['delta_levels'])
        data['eta_levels'] = tuple(data['eta_levels'])
        return ExperimentConfig(**data)


def parse_config(path):
    """Load and validate a JSON experiment configuration; REGULAB_SEED overrides master_seed"""
    from config import get_seed_override

    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: {e.msg}", {'line': e.lineno, 'column': e.colno})
    except OSError as e:
        raise StorageError(f"Cannot read config {path}: {e.strerror or e}", path)
    if not isinstance(document, dict):
        raise ConfigError(f"{path}: top level must be an object")

    try:
        seed = get_seed_override()
    except ValueError:
        raise ConfigError("REGULAB_SEED must be an integer")
    if seed is not None:
        document['master_seed'] = seed

    try:
        return ExperimentConfigSchema().load(document)
    except SchemaValidationError as e:
        field = next(iter(e.messages)) if isinstance(e.messages, dict) else None
        raise ConfigError(f"Invalid field '{field}': {e.messages[field] if field else e.messages}",
                          {'field': field, 'messages': e.messages})


def serialize_config(experiment):
    """JSON document that parse_config turns back into an equal ExperimentConfig"""
    return json.dumps(ExperimentConfigSchema().dump(experiment), indent=2)
