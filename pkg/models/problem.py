"""
Test problem models: clean operator/solution pairs and their perturbed instances
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from models.spectral import _frozen
from utils.error_handler import ValidationError


class PerturbationKind(str, Enum):
    GAUSSIAN = 'Gaussian'
    HEAT = 'Heat'
    TOMO = 'Tomo'


@dataclass(frozen=True)
class TestProblem:
    """Normalised operator A, exact solution x_true and exact data y_clean = A x_true"""

    __test__ = False  # keep pytest from collecting the class

    name: str
    a_clean: np.ndarray
    x_true: np.ndarray
    y_clean: np.ndarray
    grid_n: int = 0  # side length when x_true is a flattened image

    def __post_init__(self):
        object.__setattr__(self, 'a_clean', _frozen(self.a_clean))
        object.__setattr__(self, 'x_true', _frozen(self.x_true))
        object.__setattr__(self, 'y_clean', _frozen(self.y_clean))

    @property
    def shape(self):
        return self.a_clean.shape

    def to_dict(self):
        return {
            'name': self.name,
            'rows': int(self.a_clean.shape[0]),
            'cols': int(self.a_clean.shape[1]),
            'grid_n': self.grid_n,
            'x_norm': float(np.linalg.norm(self.x_true)),
            'y_norm': float(np.linalg.norm(self.y_clean)),
        }


@dataclass(frozen=True)
class PerturbationSpec:
    """How the operator is perturbed and by how much (relative to ||A|| = 1)"""

    kind: PerturbationKind
    eta_rel: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'kind', PerturbationKind(self.kind))
        if not 0 < self.eta_rel < 1:
            raise ValidationError("eta_rel must lie in (0, 1)", {'eta_rel': self.eta_rel})
        object.__setattr__(self, 'seed', int(self.seed))


@dataclass(frozen=True)
class NoisyInstance:
    """Perturbed operator and data with the realised noise levels"""

    a_noisy: np.ndarray
    y_noisy: np.ndarray
    eta: float
    delta: float
    data_seed: int
    op_seed: int

    def __post_init__(self):
        object.__setattr__(self, 'a_noisy', _frozen(self.a_noisy))
        object.__setattr__(self, 'y_noisy', _frozen(self.y_noisy))

    def to_dict(self):
        return {
            'eta': self.eta,
            'delta': self.delta,
            'data_seed': self.data_seed,
            'op_seed': self.op_seed,
        }
