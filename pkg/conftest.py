"""
Shared pytest fixtures
"""

import json
import logging

import numpy as np
import pytest

from core.gallery import build_instance, gen_baart
from core.spectral import svd_decompose
from models.problem import PerturbationKind, PerturbationSpec
from utils.validators import ExperimentConfigSchema


@pytest.fixture(autouse=True)
def testing_env(monkeypatch):
    """Testing profile without a seed override; drops CLI log handlers afterwards"""
    monkeypatch.setenv('REGULAB_ENV', 'testing')
    monkeypatch.delenv('REGULAB_SEED', raising=False)
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, '_regulab', False):
            root.removeHandler(handler)


@pytest.fixture(scope='session')
def baart_problem():
    return gen_baart(100)


@pytest.fixture(scope='session')
def baart_heat_instance(baart_problem):
    return build_instance(baart_problem, PerturbationSpec(PerturbationKind.HEAT, 0.05, 11), 0.05, 12)


@pytest.fixture(scope='session')
def baart_heat_svd(baart_heat_instance):
    return svd_decompose(baart_heat_instance.a_noisy)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_config():
    """Desk-scale baart-heat experiment small enough for unit tests"""
    return ExperimentConfigSchema().load({
        'problem': 'baart-heat',
        'n': 30,
        'delta_levels': [0.02, 0.05],
        'eta_levels': [0.02, 0.05],
        'realizations': 3,
        'grid_count': 40,
        'master_seed': 7,
    })


@pytest.fixture
def write_config(tmp_path):
    """Write a JSON config document and return its path"""
    def _write(document, name='config.json'):
        path = tmp_path / name
        path.write_text(json.dumps(document) if not isinstance(document, str) else document)
        return str(path)
    return _write
