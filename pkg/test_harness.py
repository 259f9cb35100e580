"""
Test script for the Monte-Carlo harness and its aggregations
"""

import math
import random
from dataclasses import replace

import numpy as np
import pytest

from core.choice_rules import rule_grid, select_alpha
from core.gallery import build_instance
from core.harness import (
    OPTIMAL_ROW, aggregate_medians, build_problem, derive_seeds, median_rows, run_grid, run_realization,
    theta_heatmap, theta_pairs,
)
from core.spectral import svd_decompose
from models.experiment import ExperimentRecord
from models.problem import PerturbationKind, PerturbationSpec
from utils.error_handler import NumericError, PairingError, ValidationError
from utils.validators import ExperimentConfigSchema


def record(rule, e_rel, realization=0, delta=0.01, eta=0.01, e_per=1.0, e_opt=0.1):
    return ExperimentRecord(rule, delta, eta, realization, 1e-3, False, e_rel, e_opt, e_per)


def test_derive_seeds_deterministic_and_distinct():
    assert derive_seeds(5, 1, 2, 3) == derive_seeds(5, 1, 2, 3)
    assert derive_seeds(5, 1, 2, 3) != derive_seeds(6, 1, 2, 3)
    seen = set()
    for i in range(10):
        for j in range(10):
            for r in range(100):
                seen.add(derive_seeds(20240521, i, j, r))
    assert len(seen) == 10 * 10 * 100
    with pytest.raises(ValidationError):
        derive_seeds(1, -1, 0, 0)


def test_run_realization_smoke():
    config = ExperimentConfigSchema().load({'problem': 'baart-heat', 'grid_count': 60, 'master_seed': 3})
    records = run_realization(config, 0.05, 0.05, 0)
    assert len(records) == 9
    assert all(r.ok for r in records)
    for r in records:
        assert all(math.isfinite(v) for v in (r.alpha_star, r.e_rel, r.e_opt, r.e_per))
        assert r.e_rel > 0 and r.e_opt > 0
    assert len({(r.op_seed, r.data_seed) for r in records}) == 1
    assert len({r.e_opt for r in records}) == 1
    assert records == run_realization(config, 0.05, 0.05, 0)


def test_standard_records_match_direct_selection(small_config):
    problem = build_problem(small_config)
    records = run_realization(small_config, 0.02, 0.05, 1, problem, cell=(0, 1))
    op_seed, data_seed = derive_seeds(small_config.master_seed, 0, 1, 1)
    instance = build_instance(problem, PerturbationSpec(PerturbationKind.HEAT, 0.05, op_seed), 0.02, data_seed)
    svd = svd_decompose(instance.a_noisy)

    for spec in small_config.rule_table():
        if not spec.is_standard:
            continue
        grid = rule_grid(spec, svd, instance.eta, small_config.grid_count)
        alpha_star, fallback = select_alpha(spec, svd, instance.y_noisy, instance.eta, grid)
        produced = next(r for r in records if r.rule == spec.rule_id)
        assert produced.alpha_star == alpha_star
        assert produced.fallback == fallback


def test_run_grid_counts_and_order(small_config):
    records = run_grid(small_config)
    assert len(records) == 2 * 2 * 3 * 9 == small_config.expected_record_count()
    assert records == sorted(records, key=lambda r: r.sort_key)


def test_run_grid_parallel_matches_sequential(small_config):
    assert run_grid(small_config, n_jobs=2) == run_grid(small_config, n_jobs=1)


def test_sampled_mode_draws_levels_in_range():
    config = ExperimentConfigSchema().load({
        'problem': 'baart-heat', 'n': 30, 'delta_levels': [0.01, 0.1], 'eta_levels': [0.01, 0.1],
        'realizations': 4, 'grid_count': 30, 'noise_mode': 'sampled',
    })
    records = run_grid(config)
    assert len(records) == 4 * 9
    for r in records:
        assert 0.01 <= r.delta_rel <= 0.1
        assert 0.01 <= r.eta_rel <= 0.1
    assert len({(r.delta_rel, r.eta_rel) for r in records}) == 4


def test_failed_realization_is_recorded(small_config, mocker):
    mocker.patch('core.harness.build_instance', side_effect=NumericError("SVD did not converge"))
    records = run_realization(small_config, 0.02, 0.02, 0)
    assert len(records) == 9
    assert all(r.status == 'error:NUMERIC_ERROR' for r in records)
    assert all(math.isnan(r.e_rel) for r in records)


def test_aggregate_medians():
    records = [record('HD', v, i) for i, v in enumerate((0.1, 0.3, 0.2))]
    records += [record('QO', v, i) for i, v in enumerate((0.1, 0.2, 0.3, 0.4))]
    medians = aggregate_medians(records)
    assert medians['HD'] == pytest.approx(0.2)
    assert medians['QO'] == pytest.approx(0.25)
    assert medians[OPTIMAL_ROW] == pytest.approx(0.1)
    assert list(medians) == ['HD', 'QO', OPTIMAL_ROW]

    shuffled = list(records)
    random.Random(4).shuffle(shuffled)
    assert aggregate_medians(shuffled) == medians


def test_aggregate_medians_needs_records():
    with pytest.raises(ValidationError):
        aggregate_medians([])


def test_median_rows_include_optimal_row():
    rows = median_rows([record('HD', 0.2), record('HD-SH1', 0.15)])
    assert [row['rule'] for row in rows] == ['HD', 'HD-SH1', OPTIMAL_ROW]
    assert rows[-1]['count'] == 1


def test_theta_heatmap_single_cell():
    matrix = theta_heatmap([record('HD', 0.2, e_per=2.0), record('HD-SH2', 0.15, e_per=1.5)], 'HD', 'HD-SH2')
    assert matrix.cells.shape == (1, 1)
    assert matrix.cells[0, 0] == pytest.approx(50.0)
    assert matrix.positive_fraction == 1.0


def test_theta_heatmap_self_comparison_is_zero(small_config):
    records = run_grid(small_config)
    matrix = theta_heatmap(records, 'HR', 'HR')
    assert matrix.cells.shape == (2, 2)
    assert np.all(matrix.cells == 0.0)


def test_theta_uses_realization_pairs():
    records = [
        record('QO', 0.2, 0, e_per=2.0), record('QO', 0.2, 1, e_per=1.0), record('QO', 0.2, 2, e_per=3.0),
        record('QO-SH1', 0.2, 0, e_per=1.0), record('QO-SH1', 0.2, 1, e_per=1.5), record('QO-SH1', 0.2, 2, e_per=1.0),
    ]
    pairs = theta_pairs(records, 'QO', 'QO-SH1')
    assert [p['theta'] for p in pairs] == pytest.approx([100.0, -50.0, 200.0])
    assert theta_heatmap(records, 'QO', 'QO-SH1').cells[0, 0] == pytest.approx(100.0)


def test_theta_heatmap_missing_pair():
    records = [record('HD', 0.2, 0), record('HD', 0.2, 1), record('HD-SH1', 0.2, 0)]
    with pytest.raises(PairingError):
        theta_heatmap(records, 'HD', 'HD-SH1')
    with pytest.raises(PairingError):
        theta_heatmap(records, 'HR', 'HR-SH1')


def test_theta_pairs_compare_seeds_including_zero():
    standard = replace(record('HD', 0.2), op_seed=0, data_seed=1)
    same = replace(record('HD-SH1', 0.1), op_seed=0, data_seed=1)
    other = replace(record('HD-SH1', 0.1), op_seed=5, data_seed=1)
    assert theta_pairs([standard, same], 'HD', 'HD-SH1')[0]['theta'] == pytest.approx(0.0)
    with pytest.raises(PairingError):
        theta_pairs([standard, other], 'HD', 'HD-SH1')
    zeros = [replace(standard, data_seed=0), replace(same, data_seed=0)]
    assert len(theta_pairs(zeros, 'HD', 'HD-SH1')) == 1


def test_build_problem_per_experiment(small_config):
    assert build_problem(small_config).shape == (30, 30)
    tomo = ExperimentConfigSchema().load({'problem': 'tomo-gauss', 'grid_n': 6})
    assert build_problem(tomo).shape == (36, 36)
    blur = ExperimentConfigSchema().load({'problem': 'blur-tomo', 'grid_n': 9})
    assert build_problem(blur).grid_n == 9
