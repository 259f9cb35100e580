"""
Monte-Carlo experiment harness: seeded realizations of every rule over a
(delta, eta) sweep, aggregation into medians and theta heatmaps
"""

import logging
import math
from collections import defaultdict

import numpy as np
from joblib import delayed

from config import Config
from core.choice_rules import evaluate_rule, optimal_alpha, rule_grid, theta
from core.gallery import PROBLEM_PERTURBATIONS, build_instance, gen_baart, gen_blur, gen_tomo
from core.spectral import svd_decompose
from extensions import make_parallel, make_rng, single_threaded_blas, spawn_seeds
from models.experiment import ExperimentRecord, HeatmapMatrix
from models.problem import PerturbationSpec
from models.rule import CompensatorKind, FunctionalKind
from utils.decorators import timed
from utils.error_handler import PairingError, RegulabError, ValidationError
from utils.helpers import median, summarize_records

logger = logging.getLogger(__name__)

# Spawn keys outside the (delta, eta, realization) index space
PROBLEM_KEY = 2 ** 32 - 1
SAMPLING_KEY = 2 ** 32 - 2

OPTIMAL_ROW = 'opt'

RULE_ORDER = [f"{f.value}" if c is CompensatorKind.NONE else f"{f.value}-{c.value}"
              for f in FunctionalKind for c in CompensatorKind]

# (standard, semi-heuristic) rule ids compared by theta heatmaps
RULE_PAIRS = [(f.value, f"{f.value}-{c.value}")
              for f in FunctionalKind for c in (CompensatorKind.SH1, CompensatorKind.SH2)]


def derive_seeds(master_seed, delta_index, eta_index, realization_index):
    """(op_seed, data_seed) of one realization.

    Mixing function: numpy SeedSequence(entropy=master_seed,
    spawn_key=(delta_index, eta_index, realization_index)).generate_state(2, uint64).
    """
    if min(delta_index, eta_index, realization_index) < 0:
        raise ValidationError("Seed indices must be nonnegative",
                              {'indices': [delta_index, eta_index, realization_index]})
    return spawn_seeds(master_seed, delta_index, eta_index, realization_index)


def build_problem(config):
    """Clean, normalised problem of an experiment"""
    problem_seed = spawn_seeds(config.master_seed, PROBLEM_KEY, count=1)[0]
    if config.problem == 'baart-heat':
        return gen_baart(config.n)
    if config.problem == 'tomo-gauss':
        return gen_tomo(config.grid_n, config.oversampling, problem_seed)
    if config.problem == 'blur-tomo':
        return gen_blur(config.grid_n, Config.BLUR_BAND, Config.BLUR_SIGMA, problem_seed)
    raise ValidationError(f"Unknown problem: {config.problem}")


def sampled_levels(config, realization_index):
    """(delta_rel, eta_rel) drawn uniformly within the configured level ranges"""
    rng = make_rng(spawn_seeds(config.master_seed, SAMPLING_KEY, realization_index, count=1)[0])
    delta_rel = rng.uniform(min(config.delta_levels), max(config.delta_levels))
    eta_rel = rng.uniform(min(config.eta_levels), max(config.eta_levels))
    return float(delta_rel), float(eta_rel)


def run_realization(config, delta_rel, eta_rel, realization_index, problem=None, cell=(0, 0)):
    """All nine rules on one seeded noisy instance; failures become error records"""
    problem = problem or build_problem(config)
    rules = config.rule_table()
    op_seed, data_seed = derive_seeds(config.master_seed, cell[0], cell[1], realization_index)

    def failed(rule_id, error_code):
        return ExperimentRecord.failed(rule_id, delta_rel, eta_rel, realization_index, error_code,
                                       op_seed, data_seed)

    try:
        kind = PROBLEM_PERTURBATIONS[config.problem]
        instance = build_instance(problem, PerturbationSpec(kind, eta_rel, op_seed), delta_rel, data_seed)
        svd = svd_decompose(instance.a_noisy)
        standard_grid = rule_grid(rules[0], svd, instance.eta, config.grid_count)
        optimum = optimal_alpha(svd, instance.y_noisy, problem.x_true, standard_grid)
    except (RegulabError, np.linalg.LinAlgError) as e:
        code = getattr(e, 'error_code', 'NUMERIC_ERROR')
        logger.warning(f"Realization {realization_index} at ({delta_rel:g}, {eta_rel:g}) failed: {e}")
        return [failed(rule.rule_id, code) for rule in rules]

    records = []
    semi_grid = None
    for rule in rules:
        try:
            if rule.is_standard:
                grid = standard_grid
            else:
                semi_grid = semi_grid or rule_grid(rule, svd, instance.eta, config.grid_count)
                grid = semi_grid
            outcome = evaluate_rule(rule, svd, instance.y_noisy, instance.eta, problem.x_true,
                                    grid=grid, optimum=optimum)
        except (RegulabError, np.linalg.LinAlgError) as e:
            code = getattr(e, 'error_code', 'NUMERIC_ERROR')
            logger.warning(f"{rule.rule_id} failed in realization {realization_index}: {e}")
            records.append(failed(rule.rule_id, code))
            continue
        records.append(ExperimentRecord(
            rule=rule.rule_id, delta_rel=delta_rel, eta_rel=eta_rel, realization=realization_index,
            alpha_star=outcome.alpha_star, fallback=outcome.fallback_used, e_rel=outcome.e_rel,
            e_opt=outcome.e_opt, e_per=outcome.e_per, op_seed=op_seed, data_seed=data_seed,
        ))
    return records


def _run_task(config, problem, task):
    delta_rel, eta_rel, realization_index, cell = task
    with single_threaded_blas():
        return run_realization(config, delta_rel, eta_rel, realization_index, problem, cell)


def grid_tasks(config):
    """(delta_rel, eta_rel, realization, cell) work items of an experiment"""
    tasks = []
    if config.noise_mode == 'sampled':
        for r in range(config.realizations):
            delta_rel, eta_rel = sampled_levels(config, r)
            tasks.append((delta_rel, eta_rel, r, (0, 0)))
        return tasks
    for i, j in config.cells:
        for r in range(config.realizations):
            tasks.append((config.delta_levels[i], config.eta_levels[j], r, (i, j)))
    return tasks


@timed('run_grid')
def run_grid(config, n_jobs=1):
    """Every realization of the experiment, sorted by (rule, delta, eta, realization)"""
    problem = build_problem(config)
    tasks = grid_tasks(config)
    logger.info(f"Running {config.problem}: {len(tasks)} realizations x {len(config.rule_table())} rules "
                f"on {n_jobs} worker(s)")

    if n_jobs == 1:
        batches = [_run_task(config, problem, task) for task in tasks]
    else:
        batches = make_parallel(n_jobs)(delayed(_run_task)(config, problem, task) for task in tasks)

    records = sorted((record for batch in batches for record in batch), key=lambda r: r.sort_key)
    summary = summarize_records(records)
    logger.info(f"Finished: {summary['ok']} ok, {summary['failed']} failed, {summary['fallbacks']} fallbacks")
    return records


def _rule_rank(rule_id):
    return RULE_ORDER.index(rule_id) if rule_id in RULE_ORDER else len(RULE_ORDER)


def aggregate_medians(records):
    """Median e_rel per rule plus an 'opt' row (median e_opt over realizations)"""
    groups = defaultdict(list)
    optimal = {}
    for record in records:
        if not record.ok:
            continue
        groups[record.rule].append(record.e_rel)
        optimal[(record.delta_rel, record.eta_rel, record.realization)] = record.e_opt
    if not groups:
        raise ValidationError("No successful records to aggregate")

    medians = {rule: median(groups[rule]) for rule in sorted(groups, key=_rule_rank)}
    medians[OPTIMAL_ROW] = median(optimal.values())
    return medians


def median_rows(records):
    """Per-rule summary rows: median e_rel, median e_per, counts"""
    medians = aggregate_medians(records)
    realizations = {(r.delta_rel, r.eta_rel, r.realization) for r in records if r.ok}
    rows = []
    for rule, value in medians.items():
        if rule == OPTIMAL_ROW:
            rows.append({'rule': rule, 'median_e_rel': value, 'median_e_per': 1.0,
                         'count': len(realizations), 'fallbacks': 0})
            continue
        group = [r for r in records if r.ok and r.rule == rule]
        rows.append({
            'rule': rule,
            'median_e_rel': value,
            'median_e_per': median(r.e_per for r in group),
            'count': len(group),
            'fallbacks': sum(1 for r in group if r.fallback),
        })
    return rows


def _index_records(records, rule_id):
    return {(r.delta_rel, r.eta_rel, r.realization): r for r in records if r.rule == rule_id}


def theta_pairs(records, standard_id, modified_id):
    """Realization-wise theta of a (standard, semi-heuristic) pair"""
    standard = _index_records(records, standard_id)
    modified = _index_records(records, modified_id)
    if not standard:
        raise PairingError(f"No records for rule {standard_id}")

    pairs = []
    for key in sorted(standard):
        if key not in modified:
            raise PairingError(f"{modified_id} has no record paired with {standard_id} at {key}",
                               {'delta_rel': key[0], 'eta_rel': key[1], 'realization': key[2]})
        s, m = standard[key], modified[key]
        seeds_known = None not in (s.op_seed, s.data_seed, m.op_seed, m.data_seed)
        if seeds_known and (s.op_seed, s.data_seed) != (m.op_seed, m.data_seed):
            raise PairingError("Paired records were produced from different seeds", {'key': list(key)})
        if not (s.ok and m.ok) or not (math.isfinite(s.e_per) and math.isfinite(m.e_per)):
            logger.warning(f"Skipping unusable pair at {key}")
            continue
        pairs.append({'delta_rel': key[0], 'eta_rel': key[1], 'realization': key[2],
                      'e_per_standard': s.e_per, 'e_per_modified': m.e_per,
                      'theta': theta(s.e_per, m.e_per)})
    return pairs


def theta_heatmap(records, standard_id, modified_id, delta_levels=None, eta_levels=None):
    """Median over realizations of the paired theta, per (delta, eta) cell"""
    pairs = theta_pairs(records, standard_id, modified_id)
    present = {(r.delta_rel, r.eta_rel) for r in records if r.rule == standard_id}
    delta_levels = sorted(delta_levels or {d for d, _ in present})
    eta_levels = sorted(eta_levels or {e for _, e in present})

    by_cell = defaultdict(list)
    for pair in pairs:
        by_cell[(pair['delta_rel'], pair['eta_rel'])].append(pair['theta'])

    cells = np.full((len(delta_levels), len(eta_levels)), np.nan)
    for i, d in enumerate(delta_levels):
        for j, e in enumerate(eta_levels):
            if (d, e) not in present:
                raise PairingError(f"Cell ({d:g}, {e:g}) has no {standard_id} records")
            if by_cell[(d, e)]:
                cells[i, j] = median(by_cell[(d, e)])
    return HeatmapMatrix(tuple(delta_levels), tuple(eta_levels), cells, standard_id, modified_id)


def all_heatmaps(records):
    """Heatmaps of every (standard, SH1/SH2) pair present in the records"""
    rules = {r.rule for r in records}
    return [theta_heatmap(records, s, m) for s, m in RULE_PAIRS if s in rules and m in rules]
