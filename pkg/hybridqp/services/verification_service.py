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

"""Suite de vérification : chaque invariant des modules qstate, gates, processor et
stochastic (et la reproductibilité de la CLI) donne exactement une ligne de rapport.

Format d'une ligne : `PASS|FAIL  <module>.<invariant>  worst=<écart>  tol=<tolérance>`.
Pour les invariants de minoration (écart attendu au-dessus d'un seuil) `worst` est le plus
petit écart observé.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.stats import unitary_group

from ..errors import HybridQPError
from ..gates import (
    SIGMA_1,
    cnot,
    compile_su2,
    embed_single_qubit,
    random_special_unitary,
    rebuild_su2,
    theta_matrix,
)
from ..processor import (
    GateFamily,
    NetworkSpec,
    ProgramAssignment,
    RotationSlot,
    TwoQubitSlot,
    apply_processor,
    build_conditional,
    canonical_network,
    momentum_processor,
    network_unitary,
    overlap_defect,
    position_kernel,
    program_data_cut,
    run_network,
)
from ..qstate import (
    EXACT_TOL,
    NORM_TOL,
    BipartiteCut,
    FactorRole,
    StateVector,
    apply_to_factor,
    basis_state,
    commutator_defect,
    dft,
    dft_matrix,
    entanglement_entropy,
    inverse_dft,
    momentum_state,
    random_state,
    schmidt_coefficients,
    tensor_product,
    unitarity_deviation,
)
from ..stochastic import (
    TWO_PI,
    deterministic_limit_operator,
    enumerate_outcome_tree,
    monte_carlo_success,
    overlap_decay,
    overlap_decay_formula,
    phase_rotation,
    phi_state,
    success_probability_exact,
)
from ..utils import phase_aligned_distance

FAULT_MAGNITUDE = 1e-3
CONDITIONAL_INSTANCES = 50
MONTE_CARLO_SIGMAS = 4.0


@dataclass(frozen=True)
class InvariantCheck:
    module: str
    name: str
    worst: float
    tolerance: float
    at_least: bool = False

    @property
    def passed(self):
        if math.isnan(self.worst):
            return False
        return self.worst >= self.tolerance if self.at_least else self.worst <= self.tolerance

    def line(self):
        status = 'PASS' if self.passed else 'FAIL'
        return f"{status}  {self.module}.{self.name}  worst={self.worst:.3e}  tol={self.tolerance:.1e}"


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed]

    def render(self):
        lines = [check.line() for check in self.checks]
        total = len(self.checks)
        verdict = 'PASS' if self.passed else 'FAIL'
        lines.append(f"{verdict}  {total - len(self.failures)}/{total} invariants vérifiés")
        return '\n'.join(lines) + '\n'


def perturbed_theta(k, q):
    """θ_k(q) dont le coefficient (0, 0) est décalé de FAULT_MAGNITUDE (injection de défaut)."""
    matrix = theta_matrix(k, q)
    matrix[0, 0] += FAULT_MAGNITUDE
    return matrix


def _max_abs(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


class VerificationService:
    """Exécute la suite d'invariants à petite échelle, de façon reproductible pour une graine."""

    def __init__(self, settings=None, seed=None, fault_inject=False):
        settings = settings or {}
        verification = settings.get('verification', {})
        stochastic = settings.get('stochastic', {})
        self.random_instances = verification.get('random_instances', 20)
        self.max_dft_size = verification.get('max_dft_size', 64)
        self.max_commutator_dim = verification.get('max_commutator_dim', 64)
        self.monte_carlo_trials = verification.get('monte_carlo_trials', 100000)
        self.batch_size = stochastic.get('batch_size', 20000)
        self.momentum_resolution = settings.get('simulation', {}).get('momentum_resolution', 256)
        self.seed = stochastic.get('seed', 0) if seed is None else seed
        self.theta = perturbed_theta if fault_inject else theta_matrix
        self.rng = np.random.default_rng(self.seed)
        self.logger = logging.getLogger(__name__)

    @property
    def checks(self):
        return [
            ('qstate', 'type_invariants', self.check_type_invariants, NORM_TOL, False),
            ('qstate', 'dft_involution', self.check_dft_involution, EXACT_TOL, False),
            ('qstate', 'momentum_state', self.check_momentum_state, EXACT_TOL, False),
            ('qstate', 'schmidt_local_invariance', self.check_schmidt_local_invariance, 1e-10, False),
            ('qstate', 'entanglement_entropy', self.check_entanglement_entropy, 1e-10, False),
            ('qstate', 'commutator_trace', self.check_commutator_trace, 1e-10, False),
            ('qstate', 'commutator_identity_defect', self.check_commutator_identity_defect, 0.5, True),
            ('gates', 'group_law', self.check_group_law, EXACT_TOL, False),
            ('gates', 'theta_unitary', self.check_theta_unitary, EXACT_TOL, False),
            ('gates', 'compile_roundtrip', self.check_compile_roundtrip, 1e-10, False),
            ('gates', 'permutation_pattern', self.check_permutation_pattern, 1e-14, False),
            ('processor', 'conditional_action', self.check_conditional_action, EXACT_TOL, False),
            ('processor', 'conditional_unitarity', self.check_conditional_unitarity, NORM_TOL, False),
            ('processor', 'basis_program_purity', self.check_basis_program_purity, 1e-10, False),
            ('processor', 'orthogonal_programs', self.check_orthogonal_programs, EXACT_TOL, False),
            ('processor', 'overlapping_programs_defect', self.check_overlapping_programs_defect, 1e-6, True),
            ('processor', 'oracle_equivalence', self.check_oracle_equivalence, EXACT_TOL, False),
            ('processor', 'network_sequence', self.check_network_sequence, EXACT_TOL, False),
            ('processor', 'network_compiled_rotation', self.check_network_compiled_rotation, 1e-10, False),
            ('processor', 'network_linearity', self.check_network_linearity, EXACT_TOL, False),
            ('stochastic', 'phi_closed_form', self.check_phi_closed_form, EXACT_TOL, False),
            ('stochastic', 'momentum_equivalence', self.check_momentum_equivalence, EXACT_TOL, False),
            ('stochastic', 'success_probability', self.check_success_probability, 1e-14, False),
            ('stochastic', 'monte_carlo', self.check_monte_carlo, MONTE_CARLO_SIGMAS, False),
            ('stochastic', 'success_branch_phase', self.check_success_branch_phase, 1e-10, False),
            ('stochastic', 'overlap_decay', self.check_overlap_decay, EXACT_TOL, False),
            ('stochastic', 'deterministic_limit', self.check_deterministic_limit, EXACT_TOL, False),
            ('cli', 'determinism', self.check_determinism, 0.0, False),
        ]

    def run(self):
        results = []
        for module, name, check, tolerance, at_least in self.checks:
            try:
                worst = float(check())
            except HybridQPError as e:
                self.logger.error(f"❌ {module}.{name} : {e}")
                worst = math.nan
            result = InvariantCheck(module, name, worst, tolerance, at_least)
            if not result.passed:
                self.logger.warning(f"⚠️ Invariant {module}.{name} non vérifié (worst={worst:.3e})")
            results.append(result)

        report = VerificationReport(tuple(results))
        if report.passed:
            self.logger.info(f"✅ {len(results)} invariants vérifiés")
        else:
            self.logger.error(f"❌ {len(report.failures)} invariant(s) en échec")
        return report

    # === OUTILS ALÉATOIRES ===

    def _unitary(self, dim):
        return unitary_group.rvs(dim, random_state=self.rng)

    def _random_network(self):
        n = int(self.rng.integers(1, 4))
        slots = []
        for position in range(int(self.rng.integers(1, 7))):
            if n > 1 and self.rng.random() < 0.4:
                control, target = self.rng.choice(n, size=2, replace=False)
                slots.append(TwoQubitSlot(f"c{position}", int(control), int(target)))
            else:
                qubit = int(self.rng.integers(n))
                slots.append(RotationSlot(qubit, tuple(f"r{position}.{k}" for k in (1, 2, 3))))
        return NetworkSpec(n, slots)

    def _basis_values(self, spec, M):
        return {
            factor_id: int(self.rng.integers(M if role is FactorRole.PROGRAM_CONTINUOUS else 2))
            for factor_id, role in spec.program_factors
        }

    @cached_property
    def _conditional_samples(self):
        """Processeurs aléatoires (M ≤ 16, N ≤ 8) avec programme de base et données aléatoires."""
        samples = []
        for _ in range(CONDITIONAL_INSTANCES):
            M, N = int(self.rng.integers(1, 17)), int(self.rng.integers(2, 9))
            blocks = [self._unitary(N) for _ in range(M)]
            U = build_conditional(blocks)
            P = int(self.rng.integers(M))
            data = random_state((N,), self.rng)
            samples.append((U, P, data, apply_processor(U, basis_state(P, (M,)), data)))
        return samples

    # === QSTATE ===

    def check_type_invariants(self):
        worst = max(unitarity_deviation(dft_matrix(M)) for M in range(1, self.max_dft_size + 1))
        for dims in [(2,), (3, 2), (2, 2, 2), (4, 3)]:
            state = random_state(dims, self.rng)
            other = random_state((2,), self.rng)
            outputs = [tensor_product(state, other)]
            for factor, d in enumerate(dims):
                outputs.append(dft(state, factor))
                outputs.append(inverse_dft(state, factor))
                outputs.append(apply_to_factor(state, self._unitary(d), factor))
            worst = max([worst] + [abs(output.norm() - 1.0) for output in outputs])
        return worst

    def check_dft_involution(self):
        worst = 0.0
        for M in range(1, self.max_dft_size + 1):
            state = random_state((M,), self.rng)
            worst = max(worst, _max_abs(inverse_dft(dft(state)).amplitudes, state.amplitudes))
        return worst

    def check_momentum_state(self):
        worst = 0.0
        for M in (1, 2, 3, 4, 8, 16):
            for p in range(M):
                expected = inverse_dft(basis_state(p, (M,))).amplitudes
                worst = max(worst, _max_abs(momentum_state(p, M).amplitudes, expected))
        return worst

    def check_schmidt_local_invariance(self):
        dims = (2, 3, 2, 2)
        cut = BipartiteCut.from_left([0, 1], len(dims))
        state = random_state(dims, self.rng)
        reference = schmidt_coefficients(state, cut)
        worst = 0.0
        for _ in range(self.random_instances):
            factor = int(self.rng.integers(len(dims)))
            rotated = apply_to_factor(state, self._unitary(dims[factor]), factor)
            worst = max(worst, _max_abs(schmidt_coefficients(rotated, cut), reference))
        return worst

    def check_entanglement_entropy(self):
        product = tensor_product(random_state((2,), self.rng), random_state((3,), self.rng))
        bell = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))
        cut = BipartiteCut.from_left([0], 2)
        return max(abs(entanglement_entropy(product, cut)), abs(entanglement_entropy(bell, cut) - 1.0))

    def check_commutator_trace(self):
        return max(
            abs(commutator_defect(D).trace_of_commutator) / D
            for D in range(2, self.max_commutator_dim + 1)
        )

    def check_commutator_identity_defect(self):
        dims = [2 ** k for k in range(1, int(math.log2(self.max_commutator_dim)) + 1)]
        return min(commutator_defect(D).max_deviation_from_identity for D in dims)

    # === GATES ===

    def check_group_law(self):
        worst = 0.0
        for k in (1, 2, 3):
            for q, r in self.rng.random((100, 2)):
                combined = self.theta(k, q) @ self.theta(k, r)
                worst = max(worst, _max_abs(combined, self.theta(k, (q + r) % 1.0)))
        return worst

    def check_theta_unitary(self):
        worst = 0.0
        for k in (1, 2, 3):
            for q in np.concatenate([[0.0, 0.25, 0.5], self.rng.random(100)]):
                matrix = self.theta(k, q)
                determinant = abs(np.linalg.det(matrix) - 1.0)
                worst = max(worst, unitarity_deviation(matrix), determinant)
        return worst

    def check_compile_roundtrip(self):
        targets = [random_special_unitary(self.rng) for _ in range(100)]
        # blocage de cardan : θ2 au voisinage de ±π/2, soit q2 ≈ 1/8 ou 3/8
        for lock in (0.125, 0.375):
            targets.append(rebuild_su2((self.rng.random(), lock, self.rng.random())))
            for _ in range(10):
                q2 = lock + self.rng.uniform(-1e-6, 1e-6)
                targets.append(rebuild_su2((self.rng.random(), q2, self.rng.random())))
        return max(phase_aligned_distance(rebuild_su2(compile_su2(target)), target) for target in targets)

    def check_permutation_pattern(self):
        worst = 0.0
        for n in (2, 3):
            for control in range(n):
                for target in range(n):
                    if control == target:
                        continue
                    matrix = np.abs(cnot(control, target, n).matrix)
                    worst = max(
                        worst,
                        float(np.max(np.minimum(matrix, np.abs(matrix - 1.0)))),
                        float(np.max(np.abs(matrix.sum(axis=0) - 1.0))),
                        float(np.max(np.abs(matrix.sum(axis=1) - 1.0))),
                    )
        for n in (1, 2, 3):
            indices = np.arange(2 ** n)
            for target in range(n):
                shift = n - 1 - target
                bits = (indices >> shift) & 1
                same_rest = ((indices[:, None] ^ indices[None, :]) & ~(1 << shift)) == 0
                for u in (SIGMA_1, self._unitary(2)):
                    expected = np.where(same_rest, u[bits[:, None], bits[None, :]], 0.0)
                    worst = max(worst, _max_abs(embed_single_qubit(u, target, n).matrix, expected))
        return worst

    # === PROCESSOR ===

    def check_conditional_action(self):
        worst = 0.0
        for U, P, data, output in self._conditional_samples:
            expected = np.kron(basis_state(P, (U.program_dim,)).amplitudes, U.blocks[P] @ data.amplitudes)
            worst = max(worst, _max_abs(output.amplitudes, expected))
        return worst

    def check_conditional_unitarity(self):
        return max(unitarity_deviation(U.matrix) for U, _, _, _ in self._conditional_samples)

    def check_basis_program_purity(self):
        worst = 0.0
        for _, _, _, output in self._conditional_samples:
            coefficients = schmidt_coefficients(output, program_data_cut(output, 1))
            worst = max(worst, abs(coefficients[0] - 1.0), float(np.sum(coefficients[1:])))
        M = self.momentum_resolution
        for _ in range(self.random_instances):
            spec = self._random_network()
            data = random_state((2,) * spec.n, self.rng)
            result = run_network(spec, ProgramAssignment(self._basis_values(spec, M)), data, M)
            coefficients = result.schmidt_coefficients()
            worst = max(worst, abs(coefficients[0] - 1.0), float(np.sum(coefficients[1:])))
        return worst

    def check_orthogonal_programs(self):
        worst = 0.0
        for U, P, _, _ in self._conditional_samples:
            M, N = U.program_dim, U.data_dim
            s, s2 = random_state((N,), self.rng), random_state((N,), self.rng)
            for P2 in {P, (P + 1) % M}:
                left = apply_processor(U, basis_state(P, (M,)), s)
                right = apply_processor(U, basis_state(P2, (M,)), s2)
                expected = (1.0 if P == P2 else 0.0) * s.inner(s2)
                worst = max(worst, abs(left.inner(right) - expected))
        return worst

    def check_overlapping_programs_defect(self):
        defects = []
        for _ in range(self.random_instances):
            a, b = random_state((2,), self.rng), random_state((2,), self.rng)
            s, s2 = random_state((2,), self.rng), random_state((2,), self.rng)
            defects.append(overlap_defect(self._unitary(2), self._unitary(2), a, b, s, s2))
        return min(defects)

    def check_oracle_equivalence(self):
        worst = 0.0
        for M in (2, 4, 8):
            families = [GateFamily.theta(axis, M) for axis in (1, 2, 3)]
            families.append(GateFamily.from_rule(lambda p: self._unitary(2), M))
            for family in families:
                worst = max(worst, _max_abs(momentum_processor(family, M).matrix, position_kernel(family)))
        return worst

    def check_network_sequence(self):
        worst = 0.0
        M = self.momentum_resolution
        for _ in range(self.random_instances):
            spec = self._random_network()
            assignment = ProgramAssignment(self._basis_values(spec, M))
            data = random_state((2,) * spec.n, self.rng)
            produced = run_network(spec, assignment, data, M).data_state().amplitudes
            expected = network_unitary(spec, assignment, M).matrix @ data.amplitudes
            worst = max(worst, _max_abs(produced, expected))
        return worst

    def check_network_compiled_rotation(self):
        worst = 0.0
        M = self.momentum_resolution
        spec = canonical_network(1)
        for _ in range(self.random_instances):
            values = {f"q0.{k}": int(self.rng.integers(M)) for k in (1, 2, 3)}
            assignment = ProgramAssignment(values)
            columns = [
                run_network(spec, assignment, basis_state(j, (2,)), M).data_state().amplitudes for j in (0, 1)
            ]
            rebuilt = rebuild_su2(tuple(values[f"q0.{k}"] / M for k in (1, 2, 3))).matrix
            worst = max(worst, _max_abs(np.column_stack(columns), rebuilt))
        return worst

    def check_network_linearity(self):
        worst = 0.0
        M = 16
        spec = canonical_network(2)
        for _ in range(self.random_instances):
            values = self._basis_values(spec, M)
            p_values = sorted(int(p) for p in self.rng.choice(M, size=2, replace=False))
            weights = random_state((2,), self.rng).amplitudes
            bits = random_state((2,), self.rng).amplitudes
            values['q0.2'] = {p: w for p, w in zip(p_values, weights)}
            values['c0'] = bits
            data = random_state((2, 2), self.rng)
            result = run_network(spec, ProgramAssignment(values), data, M)

            continuous, discrete = result.factor_ids.index('q0.2'), result.factor_ids.index('c0')
            for i, p in enumerate(p_values):
                for bit in (0, 1):
                    single = run_network(spec, ProgramAssignment({**values, 'q0.2': p, 'c0': bit}), data, M)
                    index = [0] * len(result.factor_ids)
                    index[continuous], index[discrete] = i, bit
                    produced = result.amplitudes[tuple(index)].reshape(-1)
                    expected = weights[i] * bits[bit] * single.amplitudes.reshape(-1)
                    worst = max(worst, _max_abs(produced, expected))
        return worst

    # === STOCHASTIC ===

    def check_phi_closed_form(self):
        worst = 0.0
        for m in range(1, 9):
            M = 2 ** m
            K = np.arange(M)
            for alpha in self.rng.uniform(0, TWO_PI, self.random_instances):
                expected = np.exp(0.5j * alpha * (M - 1)) * np.exp(-1j * K * alpha) / np.sqrt(M)
                worst = max(worst, _max_abs(phi_state(alpha, m).amplitudes, expected))
        return worst

    def check_momentum_equivalence(self):
        worst = 0.0
        for m in range(1, 9):
            M = 2 ** m
            programs = np.column_stack([phi_state(-TWO_PI * p / M, m).amplitudes for p in range(M)])
            # <p̃'|Φ_p> = (F Φ_p)_{p'}
            overlaps = np.abs(dft_matrix(M) @ programs)
            worst = max(worst, _max_abs(overlaps, np.eye(M)))
        return worst

    def check_success_probability(self):
        return max(abs(success_probability_exact(m) - (1.0 - 2.0 ** -m)) for m in range(1, 13))

    def check_monte_carlo(self):
        worst = 0.0
        data = StateVector(np.array([1.0, 1.0]) / np.sqrt(2), (2,))
        trials = self.monte_carlo_trials
        for m in (1, 2, 3):
            expected = 1.0 - 2.0 ** -m
            estimate = monte_carlo_success(data, 0, 1.0, m, trials, self.seed,
                                           batch_size=self.batch_size, stream=m)
            sigma = math.sqrt(expected * (1 - expected) / trials)
            worst = max(worst, abs(estimate.frequency - expected) / sigma)
        return worst

    def check_success_branch_phase(self):
        worst = 0.0
        for _ in range(self.random_instances):
            n = int(self.rng.integers(1, 3))
            target = int(self.rng.integers(n))
            alpha = float(self.rng.uniform(0, TWO_PI))
            data = random_state((2,) * n, self.rng)
            expected = embed_single_qubit(phase_rotation(alpha), target, n).matrix @ data.amplitudes
            for leaf in enumerate_outcome_tree(data, target, alpha, int(self.rng.integers(1, 5))):
                if leaf.success:
                    worst = max(worst, phase_aligned_distance(leaf.final_state.amplitudes, expected))
        return worst

    def check_overlap_decay(self):
        worst = 0.0
        for alpha, beta in self.rng.uniform(0, TWO_PI, (self.random_instances, 2)):
            for m in range(1, 13):
                brute = overlap_decay(alpha, beta, m)
                worst = max(
                    worst,
                    abs(brute - overlap_decay_formula(alpha, beta, m)),
                    abs(brute - overlap_decay(beta, alpha, m)),
                    abs(overlap_decay(alpha, alpha + TWO_PI * (m % 3), m) - 1.0),
                )
            # α ≢ β : le recouvrement décroît strictement et n'atteint pas 1
            if not overlap_decay(alpha, beta, 12) < overlap_decay(alpha, beta, 1) < 1.0:
                worst = max(worst, 1.0)
        return worst

    def check_deterministic_limit(self):
        worst = 0.0
        for m in range(1, 7):
            M = 2 ** m
            hybrid = momentum_processor(GateFamily.theta(3, M), M).matrix
            worst = max(worst, _max_abs(deterministic_limit_operator(m).matrix, hybrid))
        return worst

    # === CLI ===

    def check_determinism(self):
        from .simulation_service import SimulationService, dump_report
        from .sweep_service import SweepService

        parameters = {
            'stages': [1, 2, 3], 'alpha': 1.0, 'trials': 2000, 'seed': self.seed,
            'n': 1, 'target': 0, 'data': np.array([1.0, 1.0]) / np.sqrt(2),
        }
        sweep = SweepService({'stochastic': {'batch_size': 500}})
        runs = [sweep.to_csv(sweep.rows(parameters)) for _ in range(2)]
        target = self._unitary(2)
        simulation = SimulationService()
        reports = [dump_report(simulation.compile_matrix(target)) for _ in range(2)]
        return 0.0 if runs[0] == runs[1] and reports[0] == reports[1] else 1.0
