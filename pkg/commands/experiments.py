"""
Experiment commands: Monte-Carlo grid runs and convergence sweeps
"""

import logging
import os

import click

from core.gallery import PROBLEM_PERTURBATIONS
from core.harness import RULE_PAIRS, all_heatmaps, build_problem, median_rows, run_grid, theta_pairs
from core.theory import convergence_sweep, count_violations
from extensions import spawn_seeds
from utils.csv_storage import CsvStorage
from utils.error_handler import StorageError, error_handler
from utils.helpers import summarize_records
from utils.validators import parse_config, serialize_config

logger = logging.getLogger(__name__)

SWEEP_KEY = 2 ** 32 - 3


def _write_text(path, text):
    try:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text + '\n')
    except OSError as e:
        raise StorageError(f"Failed to write {path}: {e.strerror or e}", path)


@click.command()
@click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False))
@click.option('--out', 'out_dir', required=True, type=click.Path(file_okay=False))
@click.option('--threads', type=click.IntRange(min=1), default=None,
              help='Worker processes (defaults to REGULAB_JOBS).')
@click.pass_context
@error_handler
def run(ctx, config_path, out_dir, threads):
    """Run every rule over the configured (delta, eta) grid."""
    experiment = parse_config(config_path)
    n_jobs = threads or ctx.obj['config'].N_JOBS
    records = run_grid(experiment, n_jobs=n_jobs)

    storage = CsvStorage(out_dir)
    _write_text(storage.get_file_path('config.json'), serialize_config(experiment))
    storage.save_records(records)
    if any(r.ok for r in records):
        storage.save_rows(median_rows(records), 'medians.csv')

    if experiment.noise_mode == 'grid' and any(r.ok for r in records):
        for matrix in all_heatmaps(records):
            storage.save_heatmap(matrix)
        pairs = []
        for standard_id, modified_id in RULE_PAIRS:
            for pair in theta_pairs(records, standard_id, modified_id):
                pairs.append({'standard': standard_id, 'modified': modified_id, **pair})
        storage.save_rows(pairs, 'theta_pairs.csv',
                          ['standard', 'modified', 'delta_rel', 'eta_rel', 'realization',
                           'e_per_standard', 'e_per_modified', 'theta'])

    summary = summarize_records(records)
    click.echo(f"{summary['total']} records ({summary['ok']} ok, {summary['failed']} failed, "
               f"{summary['fallbacks']} fallbacks) written to {os.path.join(out_dir, 'records.csv')}")


def decade_levels(count, start_exponent=2):
    """(10^-2, 10^-2), (10^-3, 10^-3), ... for `count` levels"""
    return [(10.0 ** -(start_exponent + k), 10.0 ** -(start_exponent + k)) for k in range(count)]


@click.command()
@click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False))
@click.option('--levels', 'level_count', type=click.IntRange(1, 5), default=4, show_default=True,
              help='Number of decades, starting at delta = eta = 1e-2.')
@click.option('--seeds', 'seed_count', type=click.IntRange(min=1), default=5, show_default=True)
@click.option('--rule', 'rule_ids', multiple=True, help='Rule ids to sweep (default: all nine).')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), default=None)
@error_handler
def sweep(config_path, level_count, seed_count, rule_ids, out_dir):
    """Convergence sweep of the selected parameters as the noise levels shrink."""
    experiment = parse_config(config_path)
    problem = build_problem(experiment)
    kind = PROBLEM_PERTURBATIONS[experiment.problem]
    levels = decade_levels(level_count)
    seeds = [spawn_seeds(experiment.master_seed, SWEEP_KEY, k, count=1)[0] for k in range(seed_count)]

    rules = [r for r in experiment.rule_table() if not rule_ids or r.rule_id in rule_ids]
    if not rules:
        raise click.BadParameter(f"No rule matches {', '.join(rule_ids)}", param_hint='--rule')

    rows = []
    for rule in rules:
        report = convergence_sweep(problem, rule, levels, seeds, kind, experiment.grid_count)
        rows.extend(report.to_rows())
        bumps = count_violations(report.median_alpha_stars)
        click.echo(f"{rule.rule_id:8s} alpha* " + ' '.join(f"{a:.3e}" for a in report.median_alpha_stars)
                   + " | e_rel " + ' '.join(f"{e:.4f}" for e in report.median_e_rels)
                   + (f" ({bumps} non-monotone step(s))" if bumps else ''))

    if out_dir:
        path = CsvStorage(out_dir).save_rows(rows, 'sweep.csv')
        click.echo(f"sweep written to {path}")
