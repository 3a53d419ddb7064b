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

"""Service de balayage : probabilité de succès de la cascade stochastique en fonction du
nombre d'étages m (énumération exacte, forme close 1 - 2^-m, Monte Carlo)."""

import csv
import io
import logging
from dataclasses import dataclass

from ..errors import DomainError
from ..qstate import StateVector
from ..stochastic import monte_carlo_success, success_probability_exact

CSV_HEADER = ['m', 'exact', 'closed_form', 'monte_carlo', 'standard_error', 'trials']


@dataclass(frozen=True)
class SweepRow:
    m: int
    exact: float
    closed_form: float
    monte_carlo: float
    standard_error: float
    trials: int

    def as_list(self):
        return [self.m, repr(self.exact), repr(self.closed_form), repr(self.monte_carlo),
                repr(self.standard_error), self.trials]


class SweepService:
    """Une ligne par valeur de m, reproductible pour une graine donnée."""

    def __init__(self, settings=None):
        settings = settings or {}
        stochastic = settings.get('stochastic', {})
        self.batch_size = stochastic.get('batch_size', 20000)
        self.workers = stochastic.get('workers', 1)
        self.logger = logging.getLogger(__name__)

    def rows(self, parameters, seed=None):
        trials = parameters['trials']
        if trials < 1:
            raise DomainError(f"Nombre d'essais {trials} < 1")
        seed = parameters['seed'] if seed is None else seed
        data = StateVector(parameters['data'], (2,) * parameters['n'])
        target, alpha = parameters['target'], parameters['alpha']

        rows = []
        for m in parameters['stages']:
            if m < 1:
                raise DomainError(f"Nombre d'étages m={m} invalide (m ≥ 1)")
            exact = success_probability_exact(m, data, alpha, target)
            # un flux par m : la ligne ne dépend pas des autres valeurs balayées
            estimate = monte_carlo_success(
                data, target, alpha, m, trials, seed,
                batch_size=self.batch_size, workers=self.workers, stream=m,
            )
            rows.append(SweepRow(m, exact, 1.0 - 2.0 ** -m, estimate.frequency, estimate.standard_error, trials))
            self.logger.info(f"m={m} : exact {exact:.6f}, Monte Carlo {estimate.frequency:.6f}")
        return rows

    def to_csv(self, rows):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.as_list())
        return buffer.getvalue()
