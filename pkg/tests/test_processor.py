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
from numpy.testing import assert_allclose

from hybridqp.errors import DimensionError, DomainError, NormalizationError, UnitarityError
from hybridqp.gates import IDENTITY, SIGMA_1, cnot, compile_su2, rebuild_su2, theta_matrix
from hybridqp.processor import (
    ConditionalUnitary,
    FamilyDomain,
    GateFamily,
    NetworkSpec,
    ProgramAssignment,
    ProgramBasis,
    ProgramCoordinates,
    RotationSlot,
    TwoQubitSlot,
    apply_processor,
    build_conditional,
    canonical_network,
    momentum_processor,
    network_unitary,
    overlap_defect,
    position_action,
    position_kernel,
    program_data_cut,
    run_network,
)
from hybridqp.qstate import (
    FactorRole,
    StateVector,
    basis_state,
    momentum_state,
    schmidt_coefficients,
    uniform_state,
    unitarity_deviation,
)
from hybridqp.utils import phase_aligned_distance

ZERO = basis_state(0, (2,))
ONE = basis_state(1, (2,))
PLUS = StateVector(np.array([1.0, 1.0]) / np.sqrt(2), (2,))


class TestBuildConditional:
    def test_single_block(self, random_unitary):
        u = random_unitary(3)
        assert_allclose(build_conditional([u]).matrix, u)

    def test_identity_and_flip_give_cnot(self):
        assert_allclose(build_conditional([IDENTITY, SIGMA_1]).matrix, cnot(0, 1, 2).matrix)

    def test_blocks_round_trip(self, random_unitary):
        blocks = [random_unitary(2) for _ in range(4)]
        U = build_conditional(blocks)
        assert unitarity_deviation(U.matrix) <= 1e-10
        for P, block in enumerate(blocks):
            assert_allclose(U.matrix[2 * P:2 * P + 2, 2 * P:2 * P + 2], block)
            assert_allclose(U.block(P).matrix, block)

    def test_rejects_mixed_sizes(self):
        with pytest.raises(DimensionError):
            build_conditional([IDENTITY, np.eye(3)])

    def test_rejects_non_unitary_block(self):
        with pytest.raises(UnitarityError):
            build_conditional([IDENTITY, np.array([[1.0, 0.0], [0.0, 2.0]])])

    def test_rejects_empty(self):
        with pytest.raises(DimensionError):
            build_conditional([])


class TestApplyProcessor:
    U = build_conditional([IDENTITY, SIGMA_1])

    def test_identity_branch(self):
        output = apply_processor(self.U, ZERO, ONE)
        assert_allclose(output.amplitudes, basis_state(1, (2, 2)).amplitudes)

    def test_flip_branch(self):
        output = apply_processor(self.U, ONE, ZERO)
        assert_allclose(output.amplitudes, basis_state(3, (2, 2)).amplitudes)

    def test_superposed_program_entangles(self):
        output = apply_processor(self.U, PLUS, ZERO)
        assert_allclose(output.amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-15)
        coefficients = schmidt_coefficients(output, program_data_cut(output, 1))
        assert_allclose(coefficients, [2 ** -0.5, 2 ** -0.5], atol=1e-12)

    def test_program_factor_is_labelled(self):
        output = apply_processor(self.U, ONE, ZERO)
        assert output.labels[0] is FactorRole.PROGRAM_DISCRETE

    def test_matches_assembled_matrix(self, random_unitary, random_vector):
        U = build_conditional([random_unitary(3) for _ in range(5)])
        program, data = random_vector(5), random_vector(3)
        output = apply_processor(U, program, data)
        assert_allclose(output.amplitudes, U.matrix @ np.kron(program.amplitudes, data.amplitudes), atol=1e-12)

    def test_basis_programs_stay_product(self, rng, random_unitary, random_vector):
        for _ in range(20):
            M, N = int(rng.integers(1, 17)), int(rng.integers(2, 9))
            blocks = [random_unitary(N) for _ in range(M)]
            P = int(rng.integers(M))
            data = random_vector(N)
            output = apply_processor(build_conditional(blocks), basis_state(P, (M,)), data)
            expected = np.kron(basis_state(P, (M,)).amplitudes, blocks[P] @ data.amplitudes)
            assert_allclose(output.amplitudes, expected, atol=1e-12)
            assert_allclose(schmidt_coefficients(output, program_data_cut(output, 1))[0], 1.0, atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            apply_processor(self.U, basis_state(0, (3,)), ZERO)


class TestOrthogonalPrograms:
    def test_orthogonal_programs_preserve_inner_products(self, random_unitary, random_vector):
        U = build_conditional([random_unitary(2) for _ in range(3)])
        s, s2 = random_vector(2), random_vector(2)
        first = apply_processor(U, basis_state(0, (3,)), s)
        second = apply_processor(U, basis_state(2, (3,)), s2)
        assert abs(first.inner(second)) <= 1e-12

    def test_overlapping_programs_would_break_unitarity(self, random_unitary, random_vector):
        defects = [
            overlap_defect(random_unitary(2), random_unitary(2), random_vector(2), random_vector(2),
                           random_vector(2), random_vector(2))
            for _ in range(10)
        ]
        assert min(defects) > 1e-6

    def test_no_defect_for_orthogonal_programs(self, random_unitary, random_vector):
        defect = overlap_defect(random_unitary(2), random_unitary(2), ZERO, ONE, random_vector(2), random_vector(2))
        assert defect == pytest.approx(0.0, abs=1e-15)


class TestMomentumProcessor:
    def test_momentum_eigenstate_picks_its_block(self):
        U = momentum_processor(GateFamily.theta(3, 4), 4)
        output = apply_processor(U, momentum_state(1, 4), ZERO)
        expected = np.kron(momentum_state(1, 4).amplitudes, [1j, 0])
        assert_allclose(output.amplitudes, expected, atol=1e-12)
        assert output.labels[0] is FactorRole.PROGRAM_CONTINUOUS

    def test_output_is_in_position_coordinates(self):
        U = momentum_processor(GateFamily.theta(3, 4), 4)
        assert U.output_coordinates is ProgramCoordinates.POSITION
        assert build_conditional([IDENTITY, SIGMA_1]).output_coordinates is ProgramCoordinates.COMPUTATIONAL
        # l'impulsion 1 ressort comme le vecteur position e^{2πi x/4}/2, pas comme |1>
        output = apply_processor(U, momentum_state(1, 4), ZERO)
        program = output.amplitudes.reshape(4, 2)[:, 0] / 1j
        assert_allclose(program, np.exp(2j * np.pi * np.arange(4) / 4) / 2, atol=1e-12)

    @pytest.mark.parametrize('basis', list(ProgramBasis))
    def test_constant_family_is_identity(self, basis):
        U = ConditionalUnitary([IDENTITY] * 4, basis)
        assert_allclose(U.matrix, np.eye(8), atol=1e-12)

    @pytest.mark.parametrize('M', [2, 4, 8])
    def test_matches_position_kernel(self, M, random_unitary):
        for family in (GateFamily.theta(1, M), GateFamily.from_rule(lambda p: random_unitary(2), M)):
            assert_allclose(momentum_processor(family, M).matrix, position_kernel(family), atol=1e-12)

    def test_apply_agrees_with_matrix(self, random_vector):
        U = momentum_processor(GateFamily.theta(2, 8), 8)
        program, data = random_vector(8), random_vector(2)
        output = apply_processor(U, program, data)
        assert_allclose(output.amplitudes, U.matrix @ np.kron(program.amplitudes, data.amplitudes), atol=1e-12)

    def test_rejects_grid_family(self):
        with pytest.raises(DomainError):
            momentum_processor(GateFamily.theta(3, 4, FamilyDomain.GRID), 4)

    def test_rejects_wrong_size(self):
        with pytest.raises(DomainError):
            momentum_processor(GateFamily.theta(3, 4), 8)


class TestPositionAction:
    def test_first_grid_point_leaves_data_unchanged(self, random_vector):
        data = random_vector(2)
        output = position_action(GateFamily.theta(3, 4, FamilyDomain.GRID), basis_state(0, (4,)), data)
        assert_allclose(output.amplitudes, np.kron(basis_state(0, (4,)).amplitudes, data.amplitudes))

    def test_grid_point_rotates_data(self, random_vector):
        data = random_vector(2)
        output = position_action(GateFamily.theta(3, 4, FamilyDomain.GRID), basis_state(3, (4,)), data)
        expected = np.kron(basis_state(3, (4,)).amplitudes, theta_matrix(3, 0.75) @ data.amplitudes)
        assert_allclose(output.amplitudes, expected, atol=1e-15)

    def test_uniform_program_matches_conditional(self):
        family = GateFamily.theta(3, 4, FamilyDomain.GRID)
        output = position_action(family, uniform_state(4), ZERO)
        expected = apply_processor(build_conditional(family.matrices), uniform_state(4), ZERO)
        assert_allclose(output.amplitudes, expected.amplitudes, atol=1e-15)

    def test_rejects_momentum_family(self):
        with pytest.raises(DomainError):
            position_action(GateFamily.theta(3, 4), uniform_state(4), ZERO)


class TestNetworkSpec:
    def test_canonical_layout(self):
        spec = canonical_network(2)
        ids = [factor_id for factor_id, _ in spec.program_factors]
        assert ids == ['q0.1', 'q0.2', 'q0.3', 'q1.1', 'q1.2', 'q1.3', 'c0']
        assert spec.program_factors[-1][1] is FactorRole.PROGRAM_DISCRETE

    def test_rejects_reused_variable(self):
        with pytest.raises(DimensionError):
            NetworkSpec(1, [RotationSlot(0, ('a', 'b', 'c')), RotationSlot(0, ('c', 'd', 'e'))])

    def test_rejects_qubit_overflow(self):
        with pytest.raises(DimensionError):
            NetworkSpec(2, [TwoQubitSlot('c', 0, 2)])


class TestRunNetwork:
    def test_zero_program_leaves_data_unchanged(self, random_vector):
        spec = canonical_network(2)
        data = random_vector(2, 2)
        result = run_network(spec, ProgramAssignment({fid: 0 for fid, _ in spec.program_factors}), data, 256)
        assert_allclose(result.data_state().amplitudes, data.amplitudes, atol=1e-12)

    def test_controlled_not(self):
        spec = NetworkSpec(2, [TwoQubitSlot('c', 0, 1)])
        result = run_network(spec, ProgramAssignment({'c': 1}), basis_state(2, (2, 2)), 256)
        assert_allclose(result.data_state().amplitudes, basis_state(3, (2, 2)).amplitudes)

    def test_matches_gate_sequence(self, rng, random_vector):
        spec = NetworkSpec(3, [
            RotationSlot(1, ('a1', 'a2', 'a3')),
            TwoQubitSlot('c', 1, 2),
            RotationSlot(2, ('b1', 'b2', 'b3')),
            TwoQubitSlot('d', 2, 0),
        ])
        values = {fid: int(rng.integers(64)) for fid in ('a1', 'a2', 'a3', 'b1', 'b2', 'b3')}
        values.update({'c': 1, 'd': 1})
        assignment = ProgramAssignment(values)
        data = random_vector(2, 2, 2)
        result = run_network(spec, assignment, data, 64)
        expected = network_unitary(spec, assignment, 64).matrix @ data.amplitudes
        assert_allclose(result.data_state().amplitudes, expected, atol=1e-12)
        assert_allclose(result.schmidt_coefficients(), [1.0], atol=1e-10)

    def test_exact_rational_angles_reproduce_rebuild(self):
        M = 2 ** 16
        values = {'q0.1': 12345, 'q0.2': 40000, 'q0.3': 7}
        spec = canonical_network(1)
        unitary = network_unitary(spec, ProgramAssignment(values), M)
        rebuilt = rebuild_su2(tuple(values[f"q0.{k}"] / M for k in (1, 2, 3)))
        assert_allclose(unitary.matrix, rebuilt.matrix, atol=1e-10)

    def test_compiled_target_within_quantization(self, rng):
        from hybridqp.gates import random_special_unitary

        M = 2 ** 16
        spec = canonical_network(1)
        target = random_special_unitary(rng)
        angles = compile_su2(target)
        values = {f"q0.{k}": int(round(q * M)) % M for k, q in zip((1, 2, 3), angles)}
        columns = [
            run_network(spec, ProgramAssignment(values), basis_state(j, (2,)), M).data_state().amplitudes
            for j in (0, 1)
        ]
        # quantification q = p / M : au plus 2π / (2M) par rotation
        assert phase_aligned_distance(np.column_stack(columns), target) <= 3 * np.pi / M

    def test_superposed_program_is_linear(self, random_vector):
        spec = canonical_network(1)
        data = random_vector(2)
        base = {'q0.1': 3, 'q0.2': 0, 'q0.3': 5}
        weights = np.array([0.6, 0.8j])
        result = run_network(spec, ProgramAssignment({**base, 'q0.2': {1: weights[0], 6: weights[1]}}), data, 8)
        assert not result.is_basis_program
        for index, p in enumerate((1, 6)):
            single = run_network(spec, ProgramAssignment({**base, 'q0.2': p}), data, 8)
            assert_allclose(result.amplitudes[0, index, 0], weights[index] * single.amplitudes[0, 0, 0], atol=1e-12)

    def test_dense_state_places_support(self):
        spec = canonical_network(1)
        result = run_network(spec, ProgramAssignment({'q0.1': 1, 'q0.2': 0, 'q0.3': 0}), ZERO, 4)
        state = result.state()
        assert state.dims == (4, 4, 4, 2)
        # θ1(1/4) = iσ1 : |0> devient i|1>, programme (1, 0, 0)
        assert_allclose(state.amplitudes[32:34], [0.0, 1j], atol=1e-12)
        assert_allclose(np.linalg.norm(state.amplitudes), 1.0)

    def test_factors_are_in_momentum_coordinates(self):
        spec = canonical_network(1)
        result = run_network(spec, ProgramAssignment({'q0.1': 1, 'q0.2': 0, 'q0.3': 0}), ZERO, 4)
        assert result.coordinates is ProgramCoordinates.MOMENTUM
        assert [support.tolist() for support in result.supports] == [[1], [0], [0]]

    def test_large_resolution_stays_sparse(self):
        spec = canonical_network(2)
        values = {fid: 0 for fid, _ in spec.program_factors}
        values['q0.1'] = 16384
        result = run_network(spec, ProgramAssignment(values), basis_state(0, (2, 2)), 2 ** 16)
        assert result.joint_dimension == 2 ** 96 * 2 * 4
        assert result.amplitudes.size == 4
        with pytest.raises(DimensionError):
            result.state()

    def test_unassigned_variables_are_rejected(self):
        with pytest.raises(DimensionError):
            run_network(canonical_network(1), ProgramAssignment({'q0.1': 0}), ZERO, 8)

    def test_unnormalized_superposition_is_rejected(self):
        spec = canonical_network(1)
        with pytest.raises(NormalizationError):
            run_network(spec, ProgramAssignment({'q0.1': {0: 1.0, 1: 1.0}, 'q0.2': 0, 'q0.3': 0}), ZERO, 8)

    def test_network_unitary_requires_basis_program(self):
        spec = canonical_network(1)
        with pytest.raises(DimensionError):
            network_unitary(spec, ProgramAssignment({'q0.1': [0.6, 0.8], 'q0.2': 0, 'q0.3': 0}), 2)
