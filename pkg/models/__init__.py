"""
Models package initialization
"""

from .spectral import SvdFactorization
from .rule import FunctionalKind, CompensatorKind, RuleSpec, AlphaGrid, SelectionOutcome
from .problem import TestProblem, PerturbationKind, PerturbationSpec, NoisyInstance
from .experiment import ExperimentConfig, ExperimentRecord, HeatmapMatrix
from .report import OperatorBoundReport, NoiseConditionReport, ConvergenceLevel, ConvergenceSweepReport

__all__ = [
    'SvdFactorization',
    'FunctionalKind', 'CompensatorKind', 'RuleSpec', 'AlphaGrid', 'SelectionOutcome',
    'TestProblem', 'PerturbationKind', 'PerturbationSpec', 'NoisyInstance',
    'ExperimentConfig', 'ExperimentRecord', 'HeatmapMatrix',
    'OperatorBoundReport', 'NoiseConditionReport', 'ConvergenceLevel', 'ConvergenceSweepReport',
]
