"""
HybridQP - Simulation de processeurs quantiques programmables hybrides
Copyright (C) 2025 Olivier Farges olivier@olivier-farges.xyz

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU General Public License as published by
the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU General Public License for more details.

You should have received a copy of the GNU General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>.
"""

import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner
from numpy.testing import assert_allclose

from hybridqp.cli import main

EXPERIMENTS = Path(__file__).resolve().parent.parent / 'experiments'


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def invoke(runner, settings_file):
    def call(*args):
        return runner.invoke(main, ['--settings', str(settings_file), *args])
    return call


def write_doc(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding='utf-8')
    return str(path)


def as_complex(pairs):
    return np.array([re + 1j * im for re, im in pairs])


SMALL_SWEEP = {'kind': 'stochastic-sweep', 'm': {'start': 1, 'stop': 3}, 'alpha': 1.0, 'trials': 500, 'seed': 11}


class TestSimulate:
    def test_conditional_flip(self, invoke):
        result = invoke('simulate', str(EXPERIMENTS / 'conditional_flip.json'))
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert report['kind'] == 'conditional'
        assert_allclose(as_complex(report['output']['amplitudes']), [0, 0, 0, 1], atol=1e-12)
        assert report['schmidt']['rank'] == 1
        assert report['program_index'] == 1
        assert report['output']['program_coordinates'] == 'computational'
        assert_allclose(as_complex(np.reshape(report['effective_unitary'], (-1, 2))), [0, 1, 1, 0])

    def test_network_identity_leaves_data_unchanged(self, invoke):
        result = invoke('simulate', str(EXPERIMENTS / 'network_identity.json'))
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert_allclose(as_complex(report['output']['data_state']), [0.6, 0.8j, 0, 0], atol=1e-12)
        assert report['output']['program_coordinates'] == 'momentum'
        assert report['schmidt']['rank'] == 1

    def test_momentum_processor_reports_position_coordinates(self, invoke):
        result = invoke('simulate', str(EXPERIMENTS / 'conditional_theta_momentum.json'))
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert report['basis'] == 'momentum'
        assert report['output']['program_coordinates'] == 'position'

    def test_missing_dims(self, invoke, tmp_path):
        path = write_doc(tmp_path, 'broken.json', {'kind': 'conditional', 'program': '|0>', 'data': '|0>'})
        result = invoke('simulate', path)
        assert result.exit_code == 2
        assert 'dims' in result.output

    def test_sweep_document_is_rejected(self, invoke, tmp_path):
        result = invoke('simulate', write_doc(tmp_path, 'sweep.json', SMALL_SWEEP))
        assert result.exit_code == 2
        assert 'kind' in result.output

    def test_out_directory(self, invoke, tmp_path):
        out = tmp_path / 'reports'
        result = invoke('--out', str(out), 'simulate', str(EXPERIMENTS / 'conditional_flip.json'))
        assert result.exit_code == 0, result.output
        written = (out / 'conditional_flip.report.json').read_text(encoding='utf-8')
        assert json.loads(written) == json.loads(result.output)


class TestSweep:
    def test_exact_column(self, invoke, tmp_path):
        result = invoke('sweep', write_doc(tmp_path, 'sweep.json', SMALL_SWEEP))
        assert result.exit_code == 0, result.output
        lines = result.output.strip().split('\n')
        assert lines[0] == 'm,exact,closed_form,monte_carlo,standard_error,trials'
        exact = [line.split(',')[1] for line in lines[1:]]
        assert exact == ['0.5', '0.75', '0.875']

    def test_byte_identical_reruns(self, invoke, tmp_path):
        path = write_doc(tmp_path, 'sweep.json', SMALL_SWEEP)
        first, second = invoke('sweep', path), invoke('sweep', path)
        assert first.exit_code == 0
        assert first.output == second.output

    def test_seed_option_changes_estimates(self, invoke, tmp_path):
        path = write_doc(tmp_path, 'sweep.json', SMALL_SWEEP)
        first, second = invoke('--seed', '1', 'sweep', path), invoke('--seed', '2', 'sweep', path)
        assert first.exit_code == 0 and second.exit_code == 0
        assert first.output != second.output

    def test_zero_trials(self, invoke, tmp_path):
        result = invoke('sweep', write_doc(tmp_path, 'sweep.json', dict(SMALL_SWEEP, trials=0)))
        assert result.exit_code == 2
        assert 'trials' in result.output


class TestCompile:
    def test_identity(self, invoke):
        result = invoke('compile', '--matrix', '1', '0', '0', '0', '0', '0', '1', '0')
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert_allclose(report['angles'], [0.0, 0.0, 0.0], atol=1e-12)
        assert report['distance'] < 1e-10

    def test_pauli_x(self, invoke):
        result = invoke('compile', '--matrix', '0', '0', '1', '0', '1', '0', '0', '0')
        assert result.exit_code == 0, result.output
        assert_allclose(json.loads(result.output)['angles'], [0.25, 0.0, 0.0], atol=1e-12)

    def test_non_unitary(self, invoke):
        result = invoke('compile', '--matrix', '1', '0', '1', '0', '0', '0', '1', '0')
        assert result.exit_code == 2
        assert 'non unitaire' in result.output

    def test_compile_document(self, invoke):
        result = invoke('compile', str(EXPERIMENTS / 'compile_pauli_x.json'))
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert report['kind'] == 'compile'
        assert_allclose(report['angles'], [0.25, 0.0, 0.0], atol=1e-12)

    def test_compile_document_written_under_its_stem(self, invoke, tmp_path):
        out = tmp_path / 'reports'
        result = invoke('--out', str(out), 'compile', str(EXPERIMENTS / 'compile_pauli_x.json'))
        assert result.exit_code == 0, result.output
        assert (out / 'compile_pauli_x.report.json').exists()

    def test_simulate_rejects_compile_document(self, invoke):
        result = invoke('simulate', str(EXPERIMENTS / 'compile_pauli_x.json'))
        assert result.exit_code == 2
        assert 'kind' in result.output

    def test_compile_rejects_other_documents(self, invoke):
        result = invoke('compile', str(EXPERIMENTS / 'conditional_flip.json'))
        assert result.exit_code == 2
        assert 'kind' in result.output

    def test_requires_exactly_one_input(self, invoke):
        assert invoke('compile').exit_code == 2
        both = invoke('compile', str(EXPERIMENTS / 'compile_pauli_x.json'), '--matrix', '1', '0', '0', '0', '0', '0', '1', '0')
        assert both.exit_code == 2


class TestConfig:
    def test_effective_settings(self, invoke, settings_file):
        result = invoke('--momentum-resolution', '32', 'config')
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload['settings']['simulation']['momentum_resolution'] == 32
        assert payload['settings']['stochastic']['seed'] == 7
        assert payload['status']['settings_yml']['path'] == str(settings_file)

    def test_bad_seed(self, invoke):
        result = invoke('--seed', '-1', 'config')
        assert result.exit_code == 2


@pytest.mark.slow
class TestVerify:
    def test_passes(self, invoke):
        result = invoke('verify')
        assert result.exit_code == 0, result.output
        assert result.output.strip().split('\n')[-1].startswith('PASS')

    def test_fault_injection_fails(self, invoke):
        result = invoke('verify', '--fault-inject')
        assert result.exit_code == 1
        assert 'FAIL  gates.theta_unitary' in result.output
