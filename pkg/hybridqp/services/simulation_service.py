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

"""Service de simulation : exécution des documents `conditional`, `network` et `compile`
et mise en forme des rapports JSON."""

import json
import logging

import numpy as np

from ..documents import ExperimentKind
from ..errors import DimensionError, DocumentError
from ..gates import compile_su2, rebuild_su2
from ..processor import (
    ConditionalUnitary,
    GateFamily,
    ProgramBasis,
    apply_processor,
    network_unitary,
    program_data_cut,
    run_network,
)
from ..qstate import (
    NORM_TOL,
    FactorRole,
    StateVector,
    Unitary,
    schmidt_coefficients,
    schmidt_rank,
    spectrum_entropy,
    unitarity_deviation,
)
from ..utils import phase_aligned_distance


def complex_pairs(values):
    """Tableau complexe -> listes imbriquées de paires [re, im]."""
    array = np.asarray(values, dtype=complex)
    if array.ndim == 0:
        return [float(array.real), float(array.imag)]
    return [complex_pairs(item) for item in array]


def dump_report(report):
    """JSON stable : clés triées, flottants au format repr, fin de ligne LF."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def _schmidt_summary(coefficients):
    coefficients = np.asarray(coefficients, dtype=float)
    return {
        'coefficients': [float(c) for c in coefficients],
        'rank': schmidt_rank(coefficients),
        'entropy': spectrum_entropy(coefficients),
    }


class SimulationService:
    """Exécute un document d'expérience et produit le rapport correspondant."""

    def __init__(self, settings=None):
        self.settings = settings or {}
        self.logger = logging.getLogger(__name__)
        self.max_dense_dimension = self.settings.get('simulation', {}).get('max_dense_dimension', 4096)

    def run(self, doc):
        if doc.kind is ExperimentKind.CONDITIONAL:
            report = self.simulate_conditional(doc.parameters)
        elif doc.kind is ExperimentKind.NETWORK:
            report = self.simulate_network(doc.parameters)
        elif doc.kind is ExperimentKind.COMPILE:
            report = self.compile_matrix(doc.parameters['matrix'])
        else:
            raise DocumentError('kind', f"'{doc.kind.value}' ne se simule pas (utiliser la commande sweep)")
        self.logger.info(f"✅ Simulation '{doc.kind.value}' terminée")
        return report

    # === PROCESSEUR CONDITIONNEL ===

    def _conditional(self, parameters):
        if parameters['blocks'] is not None:
            blocks = parameters['blocks']
        else:
            blocks = GateFamily.theta(parameters['family']['axis'], parameters['M']).matrices
        return ConditionalUnitary(blocks, ProgramBasis(parameters['basis']))

    def simulate_conditional(self, parameters):
        U = self._conditional(parameters)
        program = StateVector(parameters['program'], (U.program_dim,), (FactorRole.PROGRAM_DISCRETE,))
        data = StateVector(parameters['data'], (U.data_dim,))
        output = apply_processor(U, program, data)
        coefficients = schmidt_coefficients(output, program_data_cut(output, 1))

        # coordonnées du programme dans la base de conditionnement
        conditioning = program.amplitudes
        if U.basis is ProgramBasis.MOMENTUM:
            conditioning = np.fft.fft(conditioning, norm='ortho')
        peak = int(np.argmax(np.abs(conditioning)))
        is_basis = abs(abs(conditioning[peak]) - 1.0) <= NORM_TOL

        return {
            'kind': ExperimentKind.CONDITIONAL.value,
            'basis': U.basis.value,
            'dims': {'program': U.program_dim, 'data': U.data_dim},
            'output': {
                'dims': list(output.dims),
                'program_coordinates': U.output_coordinates.value,
                'amplitudes': complex_pairs(output.amplitudes),
            },
            'schmidt': _schmidt_summary(coefficients),
            'program_index': peak if is_basis else None,
            'effective_unitary': complex_pairs(U.blocks[peak]) if is_basis else None,
        }

    # === RÉSEAU HYBRIDE ===

    def simulate_network(self, parameters):
        spec, assignment, M = parameters['spec'], parameters['assignment'], parameters['M']
        data = StateVector(parameters['data'], (2,) * spec.n)
        result = run_network(spec, assignment, data, M)

        factors = [
            {
                'id': factor_id,
                'role': role.value,
                'dim': dim,
                'support': [int(value) for value in support],
                'amplitudes': complex_pairs(amplitudes),
            }
            for factor_id, role, dim, support, amplitudes in zip(
                result.factor_ids, result.roles, result.program_dims, result.supports, result.program_amplitudes
            )
        ]

        dense = None
        if result.joint_dimension <= self.max_dense_dimension:
            dense = complex_pairs(result.state(self.max_dense_dimension).amplitudes)
        else:
            self.logger.info(
                f"État joint de dimension {result.joint_dimension} : seules les amplitudes sur le support sont écrites"
            )

        report = {
            'kind': ExperimentKind.NETWORK.value,
            'n': spec.n,
            'momentum_resolution': M,
            'program_factors': factors,
            'output': {
                'joint_dimension': result.joint_dimension,
                'program_coordinates': result.coordinates.value,
                'support_amplitudes': complex_pairs(result.amplitudes.reshape(-1)),
                'amplitudes': dense,
                'data_state': None,
            },
            'schmidt': _schmidt_summary(result.schmidt_coefficients()),
            'effective_unitary': None,
        }
        if result.is_basis_program:
            report['output']['data_state'] = complex_pairs(result.data_state().amplitudes)
            report['effective_unitary'] = complex_pairs(network_unitary(spec, assignment, M).matrix)
        return report

    # === COMPILATION ===

    def compile_matrix(self, matrix):
        """Angles (q1, q2, q3) et distance de la reconstruction, à une phase globale près."""
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (2, 2):
            raise DimensionError(f"Matrice 2×2 attendue, forme {matrix.shape}")
        angles = compile_su2(matrix)
        rebuilt = rebuild_su2(angles)
        return {
            'kind': ExperimentKind.COMPILE.value,
            'angles': list(angles.as_tuple()),
            'input_deviation': unitarity_deviation(matrix),
            'distance': phase_aligned_distance(rebuilt.matrix, Unitary(matrix).matrix),
            'rebuilt': complex_pairs(rebuilt.matrix),
        }
