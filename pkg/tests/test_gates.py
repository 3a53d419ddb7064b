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

from hybridqp.errors import DimensionError, DomainError, UnitarityError
from hybridqp.gates import (
    IDENTITY,
    SIGMA_1,
    SIGMA_3,
    AngleTriple,
    alpha_from_theta,
    canonical_phase,
    cnot,
    compile_su2,
    embed_single_qubit,
    random_special_unitary,
    rebuild_su2,
    theta_from_alpha,
    theta_gate,
    theta_matrix,
    theta_stack,
)
from hybridqp.qstate import basis_state, unitarity_deviation
from hybridqp.stochastic import phase_rotation
from hybridqp.utils import phase_aligned_distance


class TestTheta:
    def test_zero_angle_is_identity(self):
        assert_allclose(theta_gate(3, 0).matrix, IDENTITY)

    def test_quarter_turn_on_z(self):
        assert_allclose(theta_gate(3, 0.25).matrix, np.diag([1j, -1j]), atol=1e-15)

    def test_half_turn_is_minus_identity(self):
        assert_allclose(theta_gate(1, 0.5).matrix, -IDENTITY, atol=1e-15)

    @pytest.mark.parametrize('k', [0, 4, -1])
    def test_invalid_axis(self, k):
        with pytest.raises(DomainError):
            theta_matrix(k, 0.1)

    @pytest.mark.parametrize('k', [1, 2, 3])
    def test_group_law(self, rng, k):
        for q, r in rng.random((100, 2)):
            assert_allclose(theta_matrix(k, q) @ theta_matrix(k, r), theta_matrix(k, (q + r) % 1.0), atol=1e-12)

    @pytest.mark.parametrize('k', [1, 2, 3])
    def test_special_unitary(self, rng, k):
        for q in rng.random(50):
            matrix = theta_matrix(k, q)
            assert unitarity_deviation(matrix) <= 1e-12
            assert abs(np.linalg.det(matrix) - 1) <= 1e-12

    def test_stack_matches_single_gates(self):
        qs = [0.0, 0.125, 0.3]
        stack = theta_stack(2, qs)
        assert stack.shape == (3, 2, 2)
        for matrix, q in zip(stack, qs):
            assert_allclose(matrix, theta_matrix(2, q))


class TestCnot:
    def test_flips_target_when_control_set(self):
        assert_allclose(cnot(0, 1, 2).matrix @ basis_state(2, (2, 2)).amplitudes, basis_state(3, (2, 2)).amplitudes)

    def test_leaves_clear_control_alone(self):
        assert_allclose(cnot(0, 1, 2).matrix @ basis_state(0, (2, 2)).amplitudes, basis_state(0, (2, 2)).amplitudes)

    def test_is_a_permutation(self):
        matrix = cnot(2, 0, 3).matrix
        assert set(np.unique(matrix)) <= {0, 1}
        assert_allclose(matrix.sum(axis=0), np.ones(8))
        assert_allclose(matrix.sum(axis=1), np.ones(8))

    @pytest.mark.parametrize('control,target,n', [(0, 0, 2), (0, 2, 2), (-1, 0, 2)])
    def test_invalid_indices(self, control, target, n):
        with pytest.raises(DimensionError):
            cnot(control, target, n)


class TestEmbed:
    @pytest.mark.parametrize('n', [1, 2, 3])
    def test_identity_embeds_to_identity(self, n):
        for target in range(n):
            assert_allclose(embed_single_qubit(IDENTITY, target, n).matrix, np.eye(2 ** n))

    def test_flip_on_first_wire(self):
        state = embed_single_qubit(SIGMA_1, 0, 2).matrix @ basis_state(0, (2, 2)).amplitudes
        assert_allclose(state, basis_state(2, (2, 2)).amplitudes)

    def test_target_out_of_range(self):
        with pytest.raises(DimensionError):
            embed_single_qubit(SIGMA_3, 2, 2)


class TestCompile:
    def test_identity(self):
        assert compile_su2(IDENTITY).as_tuple() == (0.0, 0.0, 0.0)

    def test_pauli_x(self):
        angles = compile_su2(SIGMA_1)
        assert_allclose(angles.as_tuple(), (0.25, 0.0, 0.0), atol=1e-12)
        assert phase_aligned_distance(rebuild_su2(angles), SIGMA_1) <= 1e-12

    def test_pauli_x_up_to_global_phase(self):
        assert_allclose(compile_su2(1j * SIGMA_1).as_tuple(), (0.25, 0.0, 0.0), atol=1e-12)

    def test_random_round_trip(self, rng):
        for _ in range(100):
            target = random_special_unitary(rng)
            assert phase_aligned_distance(rebuild_su2(compile_su2(target)), target) <= 1e-10

    @pytest.mark.parametrize('lock', [0.125, 0.375])
    def test_round_trip_near_gimbal_lock(self, rng, lock):
        for offset in [0.0, 1e-9, -1e-7, 1e-6]:
            target = rebuild_su2((rng.random(), lock + offset, rng.random()))
            assert phase_aligned_distance(rebuild_su2(compile_su2(target)), target) <= 1e-10

    def test_angles_are_reduced(self, rng):
        for _ in range(20):
            angles = compile_su2(random_special_unitary(rng))
            assert all(0.0 <= q < 0.5 for q in angles)

    def test_rejects_non_unitary(self):
        with pytest.raises(UnitarityError) as excinfo:
            compile_su2(np.array([[1.0, 0.0], [0.0, 1.0488088481701516]]))
        assert excinfo.value.deviation == pytest.approx(0.1)

    def test_rejects_wrong_shape(self):
        with pytest.raises(DimensionError):
            compile_su2(np.eye(3))


class TestAngles:
    def test_canonical_phase_wraps(self):
        assert canonical_phase(1.25) == pytest.approx(0.25)
        assert canonical_phase(-0.25) == pytest.approx(0.75)
        assert canonical_phase(-1e-17) == 0.0

    def test_angle_triple_is_canonical(self):
        assert AngleTriple(1.5, -0.5, 0.25).as_tuple() == (0.5, 0.5, 0.25)

    def test_alpha_bridge_matches_phase_rotation(self):
        alpha = 1.3
        assert_allclose(theta_matrix(3, theta_from_alpha(alpha)), phase_rotation(alpha).matrix, atol=1e-15)
        assert alpha_from_theta(theta_from_alpha(alpha)) == pytest.approx(alpha)
