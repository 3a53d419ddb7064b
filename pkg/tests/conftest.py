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

import numpy as np
import pytest
from scipy.stats import unitary_group

from hybridqp.qstate import StateVector, random_state


@pytest.fixture
def rng():
    return np.random.default_rng(20010601)


@pytest.fixture
def random_unitary(rng):
    def factory(dim):
        return unitary_group.rvs(dim, random_state=rng)
    return factory


@pytest.fixture
def random_vector(rng):
    def factory(*dims):
        return random_state(dims, rng)
    return factory


@pytest.fixture
def plus_state():
    return StateVector(np.array([1.0, 1.0]) / np.sqrt(2), (2,))


@pytest.fixture
def settings_file(tmp_path, monkeypatch):
    """settings.yml isolé : l'environnement du poste ne fuit pas dans les tests."""
    for var in ('HYBRIDQP_SETTINGS', 'HYBRIDQP_MOMENTUM_RESOLUTION', 'HYBRIDQP_SEED',
                'HYBRIDQP_OUTPUT_DIR', 'HYBRIDQP_LOG_LEVEL'):
        monkeypatch.delenv(var, raising=False)
    path = tmp_path / 'settings.yml'
    path.write_text(
        "simulation:\n  momentum_resolution: 64\n"
        "stochastic:\n  seed: 7\n  trials: 2000\n  batch_size: 500\n"
        "verification:\n  random_instances: 5\n  max_dft_size: 16\n"
        "  max_commutator_dim: 16\n  monte_carlo_trials: 20000\n",
        encoding='utf-8',
    )
    return path
