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

import logging

import pytest

from hybridqp.config_loader import ConfigLoader


def test_defaults_when_file_is_missing(tmp_path, settings_file, caplog):
    loader = ConfigLoader(settings_file=tmp_path / 'absent.yml')
    with caplog.at_level(logging.WARNING, logger='hybridqp.config_loader'):
        settings = loader.load_settings()
    assert settings == loader._get_default_settings()
    assert 'non trouvé' in caplog.text


def test_file_values_override_defaults(settings_file):
    loader = ConfigLoader(settings_file=settings_file)
    assert loader.get('simulation.momentum_resolution') == 64
    assert loader.get('stochastic.seed') == 7
    # clés absentes du fichier : valeurs par défaut
    assert loader.get('tolerances.document_norm') == 1e-8
    assert loader.get('simulation.max_dense_dimension') == 4096


def test_unknown_path_returns_default(settings_file):
    loader = ConfigLoader(settings_file=settings_file)
    assert loader.get('simulation.unknown', 'fallback') == 'fallback'


def test_environment_overrides_file(settings_file, monkeypatch):
    monkeypatch.setenv('HYBRIDQP_SEED', '42')
    monkeypatch.setenv('HYBRIDQP_OUTPUT_DIR', 'rapports')
    loader = ConfigLoader(settings_file=settings_file)
    assert loader.get('stochastic.seed') == 42
    assert loader.get('output.directory') == 'rapports'


def test_malformed_environment_value_is_ignored(settings_file, monkeypatch, caplog):
    monkeypatch.setenv('HYBRIDQP_MOMENTUM_RESOLUTION', 'beaucoup')
    loader = ConfigLoader(settings_file=settings_file)
    with caplog.at_level(logging.WARNING, logger='hybridqp.config_loader'):
        assert loader.get('simulation.momentum_resolution') == 64
    assert 'HYBRIDQP_MOMENTUM_RESOLUTION' in caplog.text


def test_settings_path_from_environment(settings_file, monkeypatch):
    monkeypatch.setenv('HYBRIDQP_SETTINGS', str(settings_file))
    assert ConfigLoader().get('stochastic.batch_size') == 500


def test_unreadable_file_falls_back_to_defaults(tmp_path, settings_file, caplog):
    broken = tmp_path / 'broken.yml'
    broken.write_text("simulation: [1, 2\n", encoding='utf-8')
    loader = ConfigLoader(settings_file=broken)
    with caplog.at_level(logging.ERROR, logger='hybridqp.config_loader'):
        settings = loader.load_settings()
    assert settings['simulation']['momentum_resolution'] == 256
    assert 'Erreur' in caplog.text


def test_reload_picks_up_changes(settings_file):
    loader = ConfigLoader(settings_file=settings_file)
    assert loader.get('simulation.momentum_resolution') == 64
    settings_file.write_text("simulation:\n  momentum_resolution: 128\n", encoding='utf-8')
    assert loader.get('simulation.momentum_resolution') == 64

    result = loader.reload_all_configs()
    assert result['success'] is True
    assert result['details']['source'] == str(settings_file)
    assert loader.get('simulation.momentum_resolution') == 128


def test_config_status(settings_file):
    loader = ConfigLoader(settings_file=settings_file)
    assert loader.get_config_status()['settings_yml']['loaded'] is False
    loader.load_settings()
    status = loader.get_config_status()['settings_yml']
    assert status['loaded'] is True
    assert status['file_exists'] is True
    assert status['source'] == str(settings_file)


@pytest.mark.parametrize('section', ['simulation', 'tolerances', 'stochastic', 'verification', 'output', 'logging'])
def test_default_sections(section):
    assert section in ConfigLoader()._get_default_settings()


def test_only_document_tolerance_is_configurable(settings_file):
    loader = ConfigLoader(settings_file=settings_file)
    assert loader.get('tolerances') == {'document_norm': 1e-8}
