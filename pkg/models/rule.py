"""
Parameter choice rule models: functionals, compensators, search grids and outcomes
"""

import math
from dataclasses import dataclass, asdict
from enum import Enum

import numpy as np

from utils.error_handler import ValidationError


class FunctionalKind(str, Enum):
    """Heuristic functional: heuristic discrepancy, Hanke-Raus, quasi-optimality"""
    HD = 'HD'
    HR = 'HR'
    QO = 'QO'


class CompensatorKind(str, Enum):
    """Operator-error compensation subtracted from the functional"""
    NONE = 'None'
    SH1 = 'SH1'  # D * eta^s * ||x_alpha||
    SH2 = 'SH2'  # D * eta^s / sqrt(alpha)


@dataclass(frozen=True)
class RuleSpec:
    """One parameter choice rule"""

    functional: FunctionalKind
    compensator: CompensatorKind = CompensatorKind.NONE
    d_constant: float = 0.0
    gamma_factor: float = 1.0
    s_exponent: float = 1.0
    d_scaling: str = 'absolute'

    def __post_init__(self):
        object.__setattr__(self, 'functional', FunctionalKind(self.functional))
        object.__setattr__(self, 'compensator', CompensatorKind(self.compensator))
        if self.compensator is CompensatorKind.NONE and self.d_constant != 0:
            raise ValidationError("A rule without compensator must have D = 0",
                                  {'d_constant': self.d_constant})
        if self.d_constant < 0:
            raise ValidationError("D must be nonnegative", {'d_constant': self.d_constant})
        if not self.gamma_factor > 0:
            raise ValidationError("gamma_factor must be positive", {'gamma_factor': self.gamma_factor})
        if not 0 < self.s_exponent <= 1:
            raise ValidationError("s_exponent must lie in (0, 1]", {'s_exponent': self.s_exponent})
        if self.d_scaling not in ('absolute', 'inverse_norm', 'data_over_norm'):
            raise ValidationError(f"Unknown D scaling: {self.d_scaling}")

    @property
    def is_standard(self):
        return self.compensator is CompensatorKind.NONE

    @property
    def rule_id(self):
        if self.is_standard:
            return self.functional.value
        return f"{self.functional.value}-{self.compensator.value}"

    def gamma(self, eta):
        """Lower end of the semi-heuristic search interval"""
        return self.gamma_factor * eta ** self.s_exponent

    def effective_d(self, operator_norm, data_norm):
        """D after the optional scale-invariance adjustment"""
        if self.d_scaling == 'inverse_norm':
            return self.d_constant / operator_norm
        if self.d_scaling == 'data_over_norm':
            return self.d_constant * data_norm / operator_norm
        return self.d_constant

    def to_dict(self):
        data = asdict(self)
        data['functional'] = self.functional.value
        data['compensator'] = self.compensator.value
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass(frozen=True)
class AlphaGrid:
    """Logarithmically spaced search grid including both endpoints"""

    alpha_min: float
    alpha_max: float
    count: int = 200

    def __post_init__(self):
        if not (self.alpha_min > 0 and self.alpha_max > 0):
            raise ValidationError("Grid bounds must be positive",
                                  {'alpha_min': self.alpha_min, 'alpha_max': self.alpha_max})
        if not self.alpha_min < self.alpha_max:
            raise ValidationError("alpha_min must be smaller than alpha_max",
                                  {'alpha_min': self.alpha_min, 'alpha_max': self.alpha_max})
        if int(self.count) < 2:
            raise ValidationError("A grid needs at least two points", {'count': self.count})
        object.__setattr__(self, 'count', int(self.count))

    @property
    def points(self):
        points = np.geomspace(self.alpha_min, self.alpha_max, self.count)
        points[0], points[-1] = self.alpha_min, self.alpha_max
        return points

    def refined(self, factor):
        """Same interval with `factor` times as many intervals"""
        return AlphaGrid(self.alpha_min, self.alpha_max, (self.count - 1) * factor + 1)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass(frozen=True)
class SelectionOutcome:
    """Selected parameter together with the error metrics of one rule on one instance"""

    alpha_star: float
    psi_at_star: float
    fallback_used: bool
    alpha_opt: float
    e_rel: float
    e_opt: float
    e_per: float

    def to_dict(self):
        return asdict(self)

    @property
    def is_finite(self):
        return all(math.isfinite(v) for v in (self.alpha_star, self.e_rel, self.e_opt))
