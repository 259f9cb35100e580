"""
Experiment models: sweep configuration, per-rule records and theta heatmaps
"""

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from models.rule import CompensatorKind, FunctionalKind, RuleSpec


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte-Carlo experiment (validated by ExperimentConfigSchema)"""

    problem: str
    n: int = 100
    grid_n: int = 12
    oversampling: float = 1.0
    delta_levels: tuple = ()
    eta_levels: tuple = ()
    realizations: int = 100
    d_sh1: float = 600.0
    d_sh2: float = 0.12
    gamma_factor: float = 0.07
    s_exponent: float = 1.0
    d_scaling: str = 'absolute'
    grid_count: int = 200
    master_seed: int = 0
    noise_mode: str = 'grid'

    def rule_table(self):
        """The nine rules: every functional without compensator, with SH1 and with SH2"""
        rules = []
        for functional in FunctionalKind:
            rules.append(RuleSpec(functional, CompensatorKind.NONE, 0.0,
                                  self.gamma_factor, self.s_exponent, self.d_scaling))
            rules.append(RuleSpec(functional, CompensatorKind.SH1, self.d_sh1,
                                  self.gamma_factor, self.s_exponent, self.d_scaling))
            rules.append(RuleSpec(functional, CompensatorKind.SH2, self.d_sh2,
                                  self.gamma_factor, self.s_exponent, self.d_scaling))
        return rules

    @property
    def cells(self):
        """(delta_index, eta_index) pairs swept by the experiment"""
        if self.noise_mode == 'sampled':
            return [(0, 0)]
        return [(i, j) for i in range(len(self.delta_levels)) for j in range(len(self.eta_levels))]

    def expected_record_count(self):
        return len(self.cells) * self.realizations * len(self.rule_table())

    def to_dict(self):
        data = asdict(self)
        data['delta_levels'] = list(self.delta_levels)
        data['eta_levels'] = list(self.eta_levels)
        return data


@dataclass(frozen=True)
class ExperimentRecord:
    """One (rule, delta, eta, realization) row of a sweep"""

    rule: str
    delta_rel: float
    eta_rel: float
    realization: int
    alpha_star: float
    fallback: bool
    e_rel: float
    e_opt: float
    e_per: float
    status: str = 'ok'
    op_seed: int = field(default=None, compare=False)  # None when read back from CSV
    data_seed: int = field(default=None, compare=False)

    @property
    def ok(self):
        return self.status == 'ok'

    @property
    def sort_key(self):
        return (self.rule, self.delta_rel, self.eta_rel, self.realization)

    @property
    def cell(self):
        return (self.delta_rel, self.eta_rel)

    @classmethod
    def failed(cls, rule, delta_rel, eta_rel, realization, error_code, op_seed=None, data_seed=None):
        nan = math.nan
        return cls(rule, delta_rel, eta_rel, realization, nan, False, nan, nan, nan,
                   f"error:{error_code}", op_seed, data_seed)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class HeatmapMatrix:
    """Median theta per (delta, eta) cell; rows follow delta_levels, columns eta_levels"""

    delta_levels: tuple
    eta_levels: tuple
    cells: np.ndarray
    standard_id: str = ''
    modified_id: str = ''

    def __post_init__(self):
        cells = np.array(self.cells, dtype=float).reshape(len(self.delta_levels), len(self.eta_levels))
        cells.setflags(write=False)
        object.__setattr__(self, 'cells', cells)
        object.__setattr__(self, 'delta_levels', tuple(float(d) for d in self.delta_levels))
        object.__setattr__(self, 'eta_levels', tuple(float(e) for e in self.eta_levels))

    def __eq__(self, other):
        if not isinstance(other, HeatmapMatrix):
            return NotImplemented
        return (self.delta_levels == other.delta_levels
                and self.eta_levels == other.eta_levels
                and np.array_equal(self.cells, other.cells))

    @property
    def positive_fraction(self):
        """Share of cells in which the modified rule wins"""
        return float(np.mean(self.cells > 0)) if self.cells.size else 0.0
