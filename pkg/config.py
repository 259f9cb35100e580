"""
Configuration settings for the regularisation lab
"""

import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    """Base configuration class"""

    # Logging
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')
    LOG_FORMAT = os.environ.get('LOG_FORMAT', 'text')  # 'text' or 'json'
    LOG_FILE = os.environ.get('LOG_FILE')

    # Parallelism
    N_JOBS = int(os.environ.get('REGULAB_JOBS', 1))

    # Numerics
    SVD_TRUNCATION_TOL = 1e-14
    ALPHA_FLOOR = 1e-14  # lower clamp of lambda_min for the standard rules
    GRID_COUNT = 200

    # Experiments
    MASTER_SEED = 20240521
    DEFAULT_REALIZATIONS = 100
    DEFAULT_LEVELS = [round(0.01 * k, 2) for k in range(1, 11)]
    PROBLEMS = ['tomo-gauss', 'baart-heat', 'blur-tomo']
    NOISE_MODES = ['grid', 'sampled']
    D_SCALINGS = ['absolute', 'inverse_norm', 'data_over_norm']

    # Problem sizes (desk scale)
    BAART_N = 100
    GRID_N = 12
    TOMO_OVERSAMPLING = 1.0
    BLUR_BAND = 8
    BLUR_SIGMA = 0.9

    # Figure-caption constants: D for SH1, D for SH2, gamma = gamma_factor * eta
    RULE_DEFAULTS = {
        'tomo-gauss': {'d_sh1': 600.0, 'd_sh2': 0.05, 'gamma_factor': 0.005},
        'baart-heat': {'d_sh1': 600.0, 'd_sh2': 0.12, 'gamma_factor': 0.07},
        'blur-tomo': {'d_sh1': 500.0, 'd_sh2': 0.2, 'gamma_factor': 0.01},
    }


class DevelopmentConfig(Config):
    """Desk-scale configuration"""
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'DEBUG')


class FullSizeConfig(Config):
    """Full problem sizes of the reference experiments"""
    BAART_N = 400
    GRID_N = 25


class TestingConfig(Config):
    """Testing configuration"""
    LOG_LEVEL = 'WARNING'
    LOG_FILE = None
    GRID_COUNT = 60
    N_JOBS = 1


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'full': FullSizeConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}


def get_config(name=None):
    """Resolve a configuration class by name (falls back to REGULAB_ENV)"""
    name = name or os.environ.get('REGULAB_ENV', 'default')
    return config.get(name, config['default'])


def get_seed_override():
    """Return the REGULAB_SEED override as an int, or None when unset"""
    raw = os.environ.get('REGULAB_SEED')
    if raw is None or raw.strip() == '':
        return None
    return int(raw, 0)
