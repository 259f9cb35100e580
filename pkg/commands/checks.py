"""
Theory check commands: operator-error constants, noise condition, lower bounds
"""

import logging

import click
import numpy as np

from config import Config
from core.choice_rules import rule_grid
from core.gallery import build_instance, gen_baart, gen_tomo
from core.spectral import svd_decompose
from core.theory import lemma1_table, lower_bound_check, noise_condition_constant
from extensions import make_rng, spawn_seeds
from models.problem import PerturbationKind, PerturbationSpec
from models.rule import AlphaGrid, FunctionalKind, RuleSpec
from utils.csv_storage import CsvStorage
from utils.error_handler import CheckFailedError, error_handler

logger = logging.getLogger(__name__)

LEMMA1_GRID = AlphaGrid(1e-6, 1.0, 40)
LEMMA1_SIZE = 30
# Constants proven for (p, q) = (0, -1) and (1/2, -1)
KNOWN_CONSTANTS = {(0.0, -1.0): 1.0, (0.5, -1.0): 1.25}
SLACK = 1e-8


def _check_lemma1(settings, trials, seed, storage):
    reports = lemma1_table(LEMMA1_GRID, trials=trials, n=LEMMA1_SIZE, seed=seed)
    violations = []
    for report in reports:
        bound = KNOWN_CONSTANTS.get((report.p, report.q))
        marker = ''
        if bound is not None:
            ok = report.max_ratio <= bound + SLACK
            marker = f" (<= {bound:g}: {'ok' if ok else 'VIOLATED'})"
            if not ok:
                violations.append((report.p, report.q, report.max_ratio))
        click.echo(f"p={report.p:<4g} q={report.q:<5g} max ratio {report.max_ratio:.6f}{marker}")
    if storage:
        storage.save_rows([row for r in reports for row in r.to_rows()], 'lemma1.csv')
    if violations:
        raise CheckFailedError("Operator-error constant exceeded", {'violations': violations})


def _check_noise_condition(settings, trials, seed, storage):
    problem = gen_baart(settings.BAART_N)
    grid = AlphaGrid(1e-6, 1.0, 40)
    rows = []
    for functional in FunctionalKind:
        constants = []
        for trial in range(trials):
            noise = make_rng(spawn_seeds(seed, trial, count=1)[0]).standard_normal(problem.shape[0])
            report = noise_condition_constant(problem.a_clean, noise, functional, grid)
            constants.append(report.c_nc)
            rows.append({'functional': functional.value, 'trial': trial, 'c_nc': report.c_nc})
        click.echo(f"{functional.value}: C_nc median {np.median(constants):.6g}, "
                   f"range [{min(constants):.6g}, {max(constants):.6g}]")
    if storage:
        storage.save_rows(rows, 'noise_condition.csv')


def _check_lower_bounds(settings, trials, seed, storage):
    problem = gen_tomo(settings.GRID_N, settings.TOMO_OVERSAMPLING, seed)
    standard = RuleSpec(FunctionalKind.HD)
    rows = []
    for trial in range(trials):
        op_seed, data_seed = spawn_seeds(seed, trial)
        instance = build_instance(problem, PerturbationSpec(PerturbationKind.GAUSSIAN, 0.05, op_seed),
                                  0.05, data_seed)
        svd = svd_decompose(instance.a_noisy)
        holds = lower_bound_check(svd, instance.y_noisy, rule_grid(standard, svd, instance.eta))
        rows.append({'trial': trial, 'holds': holds})
    failures = [row['trial'] for row in rows if not row['holds']]
    click.echo(f"lower bounds hold on {trials - len(failures)} of {trials} tomo instances")
    if storage:
        storage.save_rows(rows, 'lower_bounds.csv')
    if failures:
        raise CheckFailedError("Lower bounds violated", {'trials': failures})


@click.command()
@click.option('--lemma1', 'which', flag_value='lemma1', help='Operator-error constants C_{p,q}.')
@click.option('--noise-condition', 'which', flag_value='noise-condition', help='Noise-condition constants.')
@click.option('--lower-bounds', 'which', flag_value='lower-bounds', help='Lower bounds of the functionals.')
@click.option('--trials', type=click.IntRange(min=1), default=50, show_default=True)
@click.option('--seed', type=click.IntRange(0, 2 ** 64 - 1), default=Config.MASTER_SEED, show_default=True)
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), default=None)
@click.pass_context
@error_handler
def check(ctx, which, trials, seed, out_dir):
    """Verify one family of inequalities numerically."""
    if which is None:
        raise click.UsageError("Choose one of --lemma1, --noise-condition, --lower-bounds")
    storage = CsvStorage(out_dir) if out_dir else None
    {
        'lemma1': _check_lemma1,
        'noise-condition': _check_noise_condition,
        'lower-bounds': _check_lower_bounds,
    }[which](ctx.obj['config'], trials, seed, storage)
