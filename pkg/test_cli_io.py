"""
Test script for configuration parsing, CSV/SVG artifacts and the command line
"""

import math
import os

import numpy as np
import pytest
from click.testing import CliRunner

from app import cli
from core.gallery import gen_baart, gen_tomo
from core.harness import OPTIMAL_ROW
from models.experiment import ExperimentRecord, HeatmapMatrix
from utils.csv_storage import (
    RECORD_FIELDS, read_heatmap_csv, read_matrix_csv, read_records_csv, write_heatmap_csv, write_matrix_csv,
    write_records_csv,
)
from utils.error_handler import ConfigError, StorageError, ValidationError
from utils.plots import dot_plot_rows, emit_dot_plot, emit_heatmap_plot
from utils.validators import parse_config, serialize_config

SMALL_RUN = {
    'problem': 'baart-heat', 'n': 20, 'delta_levels': [0.02, 0.05], 'eta_levels': [0.05],
    'realizations': 2, 'grid_count': 30, 'master_seed': 5,
}


def sample_records():
    return [
        ExperimentRecord('HD', 0.01, 0.02, 0, 1.5e-3, False, 0.25, 0.2, 1.25),
        ExperimentRecord('HD-SH1', 0.01, 0.02, 0, 2.5e-3, True, 0.22, 0.2, 1.1),
        ExperimentRecord('HD', 0.01, 0.02, 1, 0.0, False, 0.3, 0.1, 3.0),
        ExperimentRecord.failed('HD-SH1', 0.01, 0.02, 1, 'NUMERIC_ERROR'),
    ]


# Configuration

def test_config_defaults_follow_problem(write_config):
    config = parse_config(write_config({'problem': 'tomo-gauss'}))
    assert config.d_sh1 == 600.0 and config.d_sh2 == 0.05 and config.gamma_factor == 0.005
    assert config.grid_count == 200 and config.noise_mode == 'grid'
    assert len(config.delta_levels) == 10


def test_config_rejects_bad_fields(write_config):
    with pytest.raises(ConfigError) as info:
        parse_config(write_config({'problem': 'baart-heat', 'realizations': 0}))
    assert info.value.details['field'] == 'realizations'
    with pytest.raises(ConfigError):
        parse_config(write_config({'problem': 'baart-heat', 'colour': 'red'}))
    with pytest.raises(ConfigError):
        parse_config(write_config({'problem': 'baart-heat', 'delta_levels': [-0.1]}))
    with pytest.raises(ConfigError):
        parse_config(write_config([1, 2]))


def test_config_syntax_error_reports_position(write_config):
    with pytest.raises(ConfigError) as info:
        parse_config(write_config('{\n  "problem": "baart-heat",\n  oops\n}'))
    assert info.value.details['line'] == 3


def test_missing_config_is_storage_error(tmp_path):
    with pytest.raises(StorageError):
        parse_config(str(tmp_path / 'absent.json'))


def test_config_round_trip(write_config):
    config = parse_config(write_config(SMALL_RUN))
    again = parse_config(write_config(serialize_config(config), 'again.json'))
    assert again == config


def test_seed_override(write_config, monkeypatch):
    monkeypatch.setenv('REGULAB_SEED', '99')
    assert parse_config(write_config(SMALL_RUN)).master_seed == 99
    monkeypatch.setenv('REGULAB_SEED', 'many')
    with pytest.raises(ConfigError):
        parse_config(write_config(SMALL_RUN))


# CSV artifacts

def test_empty_records_file_has_header(tmp_path):
    path = tmp_path / 'records.csv'
    write_records_csv([], path)
    assert path.read_text() == ','.join(RECORD_FIELDS) + '\n'
    assert read_records_csv(path) == []


def test_records_round_trip_is_byte_stable(tmp_path):
    first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
    write_records_csv(sample_records(), first)
    loaded = read_records_csv(first)
    assert loaded[0].rule == 'HD' and loaded[0].realization == 0
    assert loaded[2].fallback is True
    assert math.isnan(loaded[-1].e_rel) and loaded[-1].status == 'error:NUMERIC_ERROR'
    write_records_csv(loaded, second)
    assert first.read_bytes() == second.read_bytes()
    assert ',0,' in first.read_text()


def test_records_reader_reports_bad_rows(tmp_path):
    path = tmp_path / 'records.csv'
    path.write_text(','.join(RECORD_FIELDS) + '\nHD,0.1\n')
    with pytest.raises(ValidationError) as info:
        read_records_csv(path)
    assert ':2:' in str(info.value)


def test_single_cell_heatmap(tmp_path):
    path = tmp_path / 'heatmap.csv'
    write_heatmap_csv(HeatmapMatrix((0.01,), (0.02,), np.array([[0.0]])), path)
    assert path.read_text().splitlines()[1].endswith(',0')
    assert read_heatmap_csv(path).cells.shape == (1, 1)


def test_heatmap_round_trip_is_byte_stable(tmp_path):
    cells = np.array([[12.5, 0.0, np.nan], [-3.25, 1e-7, 100.0]])
    write_heatmap_csv(HeatmapMatrix((0.01, 0.05), (0.01, 0.02, 0.1), cells, 'QO', 'QO-SH1'), tmp_path / 'a.csv')
    loaded = read_heatmap_csv(tmp_path / 'a.csv')
    assert loaded.cells.shape == (2, 3) and math.isnan(loaded.cells[0, 2])
    assert loaded.eta_levels == (0.01, 0.02, 0.1)
    write_heatmap_csv(loaded, tmp_path / 'b.csv')
    assert (tmp_path / 'a.csv').read_bytes() == (tmp_path / 'b.csv').read_bytes()


def test_matrix_round_trip(tmp_path, rng):
    matrix = rng.standard_normal((4, 3))
    write_matrix_csv(matrix, tmp_path / 'A.csv')
    assert np.array_equal(read_matrix_csv(tmp_path / 'A.csv'), matrix)
    write_matrix_csv(np.arange(3.0), tmp_path / 'x.csv')
    assert (tmp_path / 'x.csv').read_text().splitlines() == ['0', '1.00000000000000000e+00',
                                                             '2.00000000000000000e+00']


# Figures

def test_dot_plot_rows_order_and_optimum():
    rows = dot_plot_rows(sample_records())
    assert [label for label, _, _ in rows] == ['HD', 'HD-SH1', OPTIMAL_ROW]
    assert rows[0][2] == pytest.approx(0.275)
    assert rows[-1][1] == [0.2, 0.1]


def test_dot_plot_is_deterministic(tmp_path):
    first, second = tmp_path / 'a.svg', tmp_path / 'b.svg'
    emit_dot_plot(sample_records(), first)
    emit_dot_plot(sample_records(), second)
    assert first.read_bytes() == second.read_bytes()
    assert b'<svg' in first.read_bytes()


def test_heatmap_plot_handles_empty_cells(tmp_path):
    matrix = HeatmapMatrix((0.01, 0.02), (0.01,), np.array([[np.nan], [4.0]]), 'QO', 'QO-SH1')
    emit_heatmap_plot(matrix, tmp_path / 'theta.svg')
    assert (tmp_path / 'theta.svg').stat().st_size > 0


# Command line

def invoke(*args):
    return CliRunner().invoke(cli, list(args))


def test_gen_writes_problem(tmp_path):
    result = invoke('gen', '--problem', 'baart', '--n', '16', '--out', str(tmp_path))
    assert result.exit_code == 0, result.output
    a = read_matrix_csv(tmp_path / 'A.csv')
    x = read_matrix_csv(tmp_path / 'x.csv')
    y = read_matrix_csv(tmp_path / 'y.csv')
    assert a.shape == (16, 16) and x.shape == (16, 1)
    np.testing.assert_allclose(a @ x, y, rtol=1e-12, atol=1e-15)


def test_gen_tomo_and_phantom(tmp_path):
    assert invoke('gen', '--problem', 'tomo', '--n', '5', '--seed', '3', '--out', str(tmp_path / 't')).exit_code == 0
    assert read_matrix_csv(tmp_path / 't' / 'A.csv').shape == (25, 25)
    assert invoke('gen', '--problem', 'phantom', '--n', '6', '--out', str(tmp_path / 'p')).exit_code == 0
    assert sorted(os.listdir(tmp_path / 'p')) == ['x.csv']


def test_run_outputs_are_thread_independent(tmp_path, write_config):
    path = write_config(SMALL_RUN)
    one = invoke('run', '--config', path, '--out', str(tmp_path / 'one'), '--threads', '1')
    two = invoke('run', '--config', path, '--out', str(tmp_path / 'two'), '--threads', '2')
    assert one.exit_code == 0, one.output
    assert two.exit_code == 0, two.output

    names = sorted(os.listdir(tmp_path / 'one'))
    assert 'records.csv' in names and 'medians.csv' in names and 'config.json' in names
    assert 'heatmap_HD_vs_HD-SH2.csv' in names and 'theta_pairs.csv' in names
    assert names == sorted(os.listdir(tmp_path / 'two'))
    for name in names:
        assert (tmp_path / 'one' / name).read_bytes() == (tmp_path / 'two' / name).read_bytes(), name

    records = read_records_csv(tmp_path / 'one' / 'records.csv')
    assert len(records) == 2 * 1 * 2 * 9


def test_run_then_plot(tmp_path, write_config):
    out = tmp_path / 'run'
    assert invoke('run', '--config', write_config(SMALL_RUN), '--out', str(out)).exit_code == 0
    records = str(out / 'records.csv')
    dot = invoke('plot', '--records', records, '--kind', 'dot', '--out', str(tmp_path / 'dot.svg'))
    heat = invoke('plot', '--records', records, '--kind', 'heatmap', '--standard', 'QO',
                  '--modified', 'QO-SH1', '--out', str(tmp_path / 'heat.svg'))
    assert dot.exit_code == 0, dot.output
    assert heat.exit_code == 0, heat.output
    assert (tmp_path / 'dot.svg').exists() and (tmp_path / 'heat.svg').exists()


def test_check_lemma1(tmp_path):
    result = invoke('check', '--lemma1', '--trials', '3', '--seed', '4', '--out', str(tmp_path))
    assert result.exit_code == 0, result.output
    assert 'p=0' in result.output
    assert (tmp_path / 'lemma1.csv').exists()


def test_check_lower_bounds():
    result = invoke('check', '--lower-bounds', '--trials', '2', '--seed', '4')
    assert result.exit_code == 0, result.output
    assert 'hold on 2 of 2' in result.output


def test_check_sizes_follow_profile(mocker):
    tomo = mocker.patch('commands.checks.gen_tomo',
                        side_effect=lambda n, oversampling, seed: gen_tomo(5, oversampling, seed))
    baart = mocker.patch('commands.checks.gen_baart', side_effect=lambda n: gen_baart(20))
    assert invoke('--env', 'full', 'check', '--lower-bounds', '--trials', '1').exit_code in (0, 2)
    assert invoke('--env', 'full', 'check', '--noise-condition', '--trials', '1').exit_code == 0
    assert tomo.call_args.args[0] == 25
    assert baart.call_args.args[0] == 400
    invoke('--env', 'testing', 'check', '--lower-bounds', '--trials', '1')
    assert tomo.call_args.args[0] == 12


def test_sweep_single_rule(tmp_path, write_config):
    path = write_config({'problem': 'baart-heat', 'n': 20, 'grid_count': 30})
    result = invoke('sweep', '--config', path, '--levels', '2', '--seeds', '2', '--rule', 'HD',
                    '--out', str(tmp_path))
    assert result.exit_code == 0, result.output
    assert any(line.startswith("HD ") for line in result.output.splitlines())
    assert (tmp_path / 'sweep.csv').exists()


def test_exit_codes(tmp_path, write_config):
    assert invoke('run', '--config', write_config({'problem': 'nope'}), '--out', str(tmp_path)).exit_code == 3
    assert invoke('run', '--config', str(tmp_path / 'absent.json'), '--out', str(tmp_path)).exit_code == 5
    assert invoke('check').exit_code == 2
    assert invoke('gen', '--problem', 'baart').exit_code == 2
