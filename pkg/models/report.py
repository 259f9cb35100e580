"""
Reports produced by the numerical verification of the operator-error estimates
"""

from dataclasses import dataclass, field, asdict

import numpy as np

from models.rule import AlphaGrid, FunctionalKind


@dataclass(frozen=True)
class OperatorBoundReport:
    """Largest observed ||f_q(A_eta) B_eta,p - f_q(A) B_p|| * alpha^(1/2-p-q) / eta"""

    p: float
    q: float
    max_ratio: float
    alpha_grid: AlphaGrid
    trials: int
    eta_zero: bool = False
    ratios: tuple = field(default=(), compare=False)  # per-trial maxima

    def to_rows(self):
        """One row per trial"""
        return [{'p': self.p, 'q': self.q, 'trial': i, 'max_ratio': r}
                for i, r in enumerate(self.ratios)]

    def to_dict(self):
        data = asdict(self)
        data['ratios'] = list(self.ratios)
        return data


@dataclass(frozen=True)
class NoiseConditionReport:
    """Empirical noise-condition constant of one functional on a grid"""

    functional: FunctionalKind
    c_nc: float
    grid: AlphaGrid
    ratios: np.ndarray = field(default=None, compare=False)  # per grid point

    def to_rows(self):
        return [{'functional': FunctionalKind(self.functional).value, 'alpha': float(a), 'ratio': float(r)}
                for a, r in zip(self.grid.points, self.ratios)]


@dataclass(frozen=True)
class ConvergenceLevel:
    """Outcome of one noise level: per-seed selections and their medians"""

    delta_rel: float
    eta_rel: float
    alpha_stars: tuple
    e_rels: tuple

    @property
    def median_alpha_star(self):
        return float(np.median(self.alpha_stars))

    @property
    def median_e_rel(self):
        return float(np.median(self.e_rels))


@dataclass(frozen=True)
class ConvergenceSweepReport:
    """Selected parameters and errors along a sequence of decreasing noise levels"""

    rule_id: str
    gamma_factor: float
    levels: tuple

    @property
    def median_alpha_stars(self):
        return [level.median_alpha_star for level in self.levels]

    @property
    def median_e_rels(self):
        return [level.median_e_rel for level in self.levels]

    def to_rows(self):
        return [{'rule': self.rule_id, 'delta_rel': lv.delta_rel, 'eta_rel': lv.eta_rel,
                 'alpha_star': lv.median_alpha_star, 'e_rel': lv.median_e_rel}
                for lv in self.levels]
