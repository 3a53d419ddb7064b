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

"""Le processeur quantique : dynamique conditionnelle Σ_P |P><P| ⊗ u_P, opérateur hybride Ũ
diagonal par blocs dans la base des impulsions, action sur la grille de positions et
exécution d'un réseau universel (triplets de rotations + CNOT contrôlés par des bits programme).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Mapping, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import block_diag

from .errors import DimensionError, DomainError, NormalizationError, UnitarityError
from .gates import cnot, embed_single_qubit, theta_matrix, theta_stack
from .qstate import (
    NORM_TOL,
    BipartiteCut,
    FactorRole,
    StateVector,
    Unitary,
    dft_matrix,
)

logger = logging.getLogger(__name__)

DEFAULT_MOMENTUM_RESOLUTION = 2 ** 8
DEFAULT_MAX_DENSE_DIMENSION = 4096


class FamilyDomain(Enum):
    MOMENTUM = 'momentum'
    GRID = 'grid'


class ProgramBasis(Enum):
    COMPUTATIONAL = 'computational'
    MOMENTUM = 'momentum'


class ProgramCoordinates(Enum):
    """Coordonnées dans lesquelles un état de sortie porte ses facteurs programme."""

    COMPUTATIONAL = 'computational'
    POSITION = 'position'
    MOMENTUM = 'momentum'


def _as_matrix(u):
    return u.matrix if isinstance(u, Unitary) else np.asarray(u, dtype=complex)


def _stack_unitaries(blocks):
    """Empile des blocs N×N en vérifiant dimensions et unitarité."""
    if len(blocks) == 0:
        raise DimensionError("Aucun bloc fourni")
    matrices = [_as_matrix(block) for block in blocks]
    shape = matrices[0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise DimensionError(f"Bloc non carré : forme {shape}")
    for index, matrix in enumerate(matrices):
        if matrix.shape != shape:
            raise DimensionError(f"Bloc {index} de forme {matrix.shape}, attendu {shape}")
    stack = np.array(matrices, dtype=complex)
    gram = np.einsum('pji,pjk->pik', stack.conj(), stack)
    deviations = np.max(np.abs(gram - np.eye(shape[0])), axis=(1, 2))
    worst = int(np.argmax(deviations))
    if deviations[worst] > NORM_TOL:
        raise UnitarityError(
            f"Bloc {worst} non unitaire (||U†U - I||_max = {deviations[worst]:.3e})", float(deviations[worst])
        )
    stack.setflags(write=False)
    return stack


@dataclass(frozen=True, eq=False)
class GateFamily:
    """Table indice -> porte unitaire N×N, évaluée une fois pour toutes."""

    domain: FamilyDomain
    matrices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'domain', FamilyDomain(self.domain))
        object.__setattr__(self, 'matrices', _stack_unitaries(list(self.matrices)))

    @classmethod
    def from_rule(cls, rule, M, domain=FamilyDomain.MOMENTUM):
        return cls(domain, [_as_matrix(rule(index)) for index in range(M)])

    @classmethod
    def theta(cls, axis, M, domain=FamilyDomain.MOMENTUM):
        """Famille p ↦ θ_axis(p / M) : les M programmes balayent exactement une période."""
        return cls(domain, theta_stack(axis, np.arange(M) / M))

    @property
    def size(self):
        return self.matrices.shape[0]

    @property
    def data_dim(self):
        return self.matrices.shape[1]

    def __getitem__(self, index):
        return Unitary(self.matrices[index])


@dataclass(frozen=True, eq=False)
class ConditionalUnitary:
    """Σ_P |P><P| ⊗ u_P, les |P> étant la base computationnelle ou la base des impulsions."""

    blocks: np.ndarray
    basis: ProgramBasis = ProgramBasis.COMPUTATIONAL

    def __post_init__(self):
        object.__setattr__(self, 'basis', ProgramBasis(self.basis))
        object.__setattr__(self, 'blocks', _stack_unitaries(list(self.blocks)))

    @property
    def program_dim(self):
        return self.blocks.shape[0]

    @property
    def data_dim(self):
        return self.blocks.shape[1]

    @property
    def output_coordinates(self):
        """Coordonnées du facteur programme dans la sortie de `apply_processor`."""
        if self.basis is ProgramBasis.MOMENTUM:
            return ProgramCoordinates.POSITION
        return ProgramCoordinates.COMPUTATIONAL

    def block(self, P):
        return Unitary(self.blocks[P])

    def block_matrix(self):
        """Matrice diagonale par blocs, dans la base de conditionnement."""
        return block_diag(*self.blocks)

    @cached_property
    def matrix(self):
        """Opérateur complet, facteur programme en coordonnées position/computationnelles."""
        blocks = self.block_matrix()
        if self.basis is ProgramBasis.COMPUTATIONAL:
            return blocks
        change = np.kron(dft_matrix(self.program_dim), np.eye(self.data_dim))
        return change.conj().T @ blocks @ change

    def unitary(self):
        return Unitary(self.matrix)


def build_conditional(blocks):
    """U = Σ_P |P><P| ⊗ u_P, matrice diagonale par blocs MN × MN."""
    conditional = ConditionalUnitary(blocks)
    logger.debug(f"Dynamique conditionnelle : M={conditional.program_dim}, N={conditional.data_dim}")
    return conditional


def apply_processor(U, program, data):
    """U(|programme> ⊗ |données>), calculé bloc par bloc sans assembler la matrice.

    Le facteur programme de la sortie est en coordonnées `U.output_coordinates`.
    """
    if program.size != U.program_dim or data.size != U.data_dim:
        raise DimensionError(
            f"Registres ({program.size}, {data.size}) incompatibles avec le processeur "
            f"({U.program_dim}, {U.data_dim})"
        )
    coefficients = np.outer(program.amplitudes, data.amplitudes)
    if U.basis is ProgramBasis.MOMENTUM:
        coefficients = np.fft.fft(coefficients, axis=0, norm='ortho')
    coefficients = np.einsum('pab,pb->pa', U.blocks, coefficients)
    if U.basis is ProgramBasis.MOMENTUM:
        coefficients = np.fft.ifft(coefficients, axis=0, norm='ortho')
        role = FactorRole.PROGRAM_CONTINUOUS
    else:
        role = FactorRole.PROGRAM_DISCRETE

    labels = (role,) * len(program.dims) + data.labels
    return StateVector(coefficients.reshape(-1), program.dims + data.dims, labels)


def momentum_processor(family, M):
    """Ũ : Ũ(|p̃>|s>) = |p̃>|u_(p) s>, diagonal par blocs dans la base des impulsions."""
    if family.domain is not FamilyDomain.MOMENTUM:
        raise DomainError(f"Famille définie sur le domaine '{family.domain.value}', impulsions attendues")
    if family.size != M:
        raise DomainError(f"Famille de taille {family.size} pour une résolution M={M}")
    return ConditionalUnitary(family.matrices, ProgramBasis.MOMENTUM)


def position_kernel(family):
    """Représentation position de Ũ construite directement :
    <j|Ũ|j'> = (1/M) Σ_p e^{2πi p (j - j') / M} u_(p)."""
    M, N = family.size, family.data_dim
    j = np.arange(M)
    offsets = j[:, None] - j[None, :]
    phases = np.exp(2j * np.pi * offsets[:, :, None] * j[None, None, :] / M) / M
    kernel = np.einsum('abp,pxy->axby', phases, family.matrices)
    return kernel.reshape(M * N, M * N)


def position_action(family, program, data):
    """Action sur la grille : l'amplitude (j, ·) devient ψ_j · u_(q_j)|données>, q_j = j / M."""
    if family.domain is not FamilyDomain.GRID:
        raise DomainError(f"Famille définie sur le domaine '{family.domain.value}', grille attendue")
    if program.size != family.size or data.size != family.data_dim:
        raise DimensionError(
            f"Registres ({program.size}, {data.size}) incompatibles avec la famille "
            f"({family.size}, {family.data_dim})"
        )
    rotated = np.einsum('jab,b->ja', family.matrices, data.amplitudes)
    amplitudes = program.amplitudes[:, None] * rotated
    labels = (FactorRole.PROGRAM_CONTINUOUS,) * len(program.dims) + data.labels
    return StateVector(amplitudes.reshape(-1), program.dims + data.dims, labels)


def overlap_defect(u, v, a, b, s, s2):
    """|<a|b><s|s2> - <a|b><u s|v s2>| : nul pour tout couple u, v seulement si <a|b> = 0."""
    u, v = _as_matrix(u), _as_matrix(v)
    program_overlap = a.inner(b)
    before = program_overlap * s.inner(s2)
    after = program_overlap * complex(np.vdot(u @ s.amplitudes, v @ s2.amplitudes))
    return float(abs(before - after))


# === RÉSEAU HYBRIDE ===

@dataclass(frozen=True)
class RotationSlot:
    """Triplet θ1, θ2, θ3 sur `qubit`, piloté par trois variables continues du programme."""

    qubit: int
    vars: Tuple[str, str, str]

    def __post_init__(self):
        object.__setattr__(self, 'vars', tuple(self.vars))
        if len(self.vars) != 3:
            raise DimensionError(f"Un RotationSlot attend 3 variables, reçu {len(self.vars)}")


@dataclass(frozen=True)
class TwoQubitSlot:
    """CNOT control -> target appliqué quand le bit programme `control_bit` vaut 1."""

    control_bit: str
    control: int
    target: int


@dataclass(frozen=True)
class NetworkSpec:
    n: int
    slots: Tuple[Union[RotationSlot, TwoQubitSlot], ...]

    def __post_init__(self):
        object.__setattr__(self, 'slots', tuple(self.slots))
        if self.n < 1:
            raise DimensionError(f"Nombre de qubits invalide : {self.n}")
        seen = set()
        for position, slot in enumerate(self.slots):
            if isinstance(slot, RotationSlot):
                qubits, ids = (slot.qubit,), slot.vars
            elif isinstance(slot, TwoQubitSlot):
                if slot.control == slot.target:
                    raise DimensionError(f"Slot {position} : contrôle et cible identiques")
                qubits, ids = (slot.control, slot.target), (slot.control_bit,)
            else:
                raise DimensionError(f"Slot {position} de type inconnu : {type(slot).__name__}")
            for qubit in qubits:
                if not 0 <= qubit < self.n:
                    raise DimensionError(f"Slot {position} : qubit {qubit} hors de [0, {self.n})")
            for factor_id in ids:
                if factor_id in seen:
                    raise DimensionError(f"Variable programme '{factor_id}' utilisée plusieurs fois")
                seen.add(factor_id)

    @property
    def program_factors(self):
        """Liste ordonnée (identifiant, rôle) des facteurs du registre programme."""
        factors = []
        for slot in self.slots:
            if isinstance(slot, RotationSlot):
                factors.extend((var, FactorRole.PROGRAM_CONTINUOUS) for var in slot.vars)
            else:
                factors.append((slot.control_bit, FactorRole.PROGRAM_DISCRETE))
        return factors


def canonical_network(n):
    """Un triplet de rotations par qubit, puis une couche de CNOT i -> i+1 contrôlés."""
    slots = [RotationSlot(i, (f"q{i}.1", f"q{i}.2", f"q{i}.3")) for i in range(n)]
    slots += [TwoQubitSlot(f"c{i}", i, i + 1) for i in range(n - 1)]
    return NetworkSpec(n, slots)


ProgramValue = Union[int, Sequence[complex], Mapping[int, complex]]


@dataclass(frozen=True)
class ProgramAssignment:
    """Valeur de chaque facteur programme : valeur propre (impulsion ou bit), vecteur
    d'amplitudes complet, ou dictionnaire creux {valeur: amplitude}."""

    values: Dict[str, ProgramValue] = field(default_factory=dict)

    def resolve(self, factor_id, role, M):
        """(support, amplitudes) du facteur : seules les valeurs portant une amplitude sont gardées."""
        if factor_id not in self.values:
            raise DimensionError(f"Variable programme '{factor_id}' non assignée")
        value = self.values[factor_id]
        dim = M if role is FactorRole.PROGRAM_CONTINUOUS else 2

        if isinstance(value, (int, np.integer)):
            if not 0 <= value < dim:
                raise DimensionError(f"Valeur {value} de '{factor_id}' hors de [0, {dim})")
            return np.array([int(value)]), np.array([1.0 + 0j])

        if isinstance(value, Mapping):
            support = np.array(sorted(int(k) for k in value), dtype=int)
            amplitudes = np.array([complex(value[k]) for k in sorted(value, key=int)], dtype=complex)
            if support.size and (support[0] < 0 or support[-1] >= dim):
                raise DimensionError(f"Support de '{factor_id}' hors de [0, {dim})")
        else:
            dense = np.asarray(value, dtype=complex).reshape(-1)
            if dense.size != dim:
                raise DimensionError(f"'{factor_id}' : {dense.size} amplitudes, attendu {dim}")
            support = np.flatnonzero(dense)
            amplitudes = dense[support]

        deviation = abs(np.linalg.norm(amplitudes) - 1.0)
        if deviation > NORM_TOL:
            raise NormalizationError(f"Amplitudes de '{factor_id}' non normalisées (écart {deviation:.3e})", deviation)
        return support, amplitudes


@dataclass(frozen=True, eq=False)
class NetworkResult:
    """État joint programme ⊗ données en sortie de réseau.

    Les facteurs continus sont portés en coordonnées d'IMPULSION et restreints aux valeurs
    qui portent une amplitude ; `state()` reconstruit le vecteur dense complet. `coordinates`
    le rappelle, `apply_processor` rendant au contraire ses facteurs continus en position.
    """

    factor_ids: Tuple[str, ...]
    roles: Tuple[FactorRole, ...]
    program_dims: Tuple[int, ...]
    supports: Tuple[np.ndarray, ...]
    program_amplitudes: Tuple[np.ndarray, ...]
    amplitudes: np.ndarray
    n: int
    coordinates: ProgramCoordinates = ProgramCoordinates.MOMENTUM

    @property
    def joint_dimension(self):
        return int(np.prod(self.program_dims, dtype=object)) * 2 ** self.n

    @property
    def is_basis_program(self):
        return all(support.size == 1 for support in self.supports)

    def _matrix(self):
        return self.amplitudes.reshape(-1, 2 ** self.n)

    def state(self, max_dimension=DEFAULT_MAX_DENSE_DIMENSION):
        if self.joint_dimension > max_dimension:
            raise DimensionError(
                f"État joint de dimension {self.joint_dimension} > {max_dimension} : densification refusée"
            )
        dense = np.zeros(self.program_dims + (2 ** self.n,), dtype=complex)
        dense[np.ix_(*self.supports, np.arange(2 ** self.n))] = self._matrix().reshape(
            tuple(s.size for s in self.supports) + (2 ** self.n,)
        )
        dims = self.program_dims + (2,) * self.n
        labels = self.roles + (FactorRole.DATA_QUBIT,) * self.n
        return StateVector(dense.reshape(-1), dims, labels)

    def schmidt_coefficients(self):
        """Coefficients de Schmidt à travers la coupure programme | données."""
        if not self.factor_ids:
            return np.array([1.0])
        return np.linalg.svd(self._matrix(), compute_uv=False)

    def data_state(self):
        """Registre de données quand chaque facteur programme est un état de base."""
        if not self.is_basis_program:
            raise DimensionError("Programme en superposition : le registre de données n'est pas factorisé")
        weight = np.prod([amplitudes[0] for amplitudes in self.program_amplitudes]) if self.factor_ids else 1.0
        return StateVector(self._matrix().reshape(-1) / weight, (2,) * self.n)

    def program_values(self):
        """Valeur de base de chaque facteur (programme de base uniquement)."""
        if not self.is_basis_program:
            raise DimensionError("Programme en superposition")
        return {factor_id: int(support[0]) for factor_id, support in zip(self.factor_ids, self.supports)}


def _apply_conditioned_rotation(tensor, factor_axis, qubit_axis, gates):
    moved = np.moveaxis(tensor, (factor_axis, qubit_axis), (0, 1))
    rotated = np.einsum('pab,pb...->pa...', gates, moved)
    return np.moveaxis(rotated, (0, 1), (factor_axis, qubit_axis))


def _apply_conditioned_cnot(tensor, factor_axis, control_axis, target_axis, support):
    moved = np.moveaxis(tensor, (factor_axis, control_axis, target_axis), (0, 1, 2)).copy()
    for index, bit in enumerate(support):
        if bit == 1:
            moved[index, 1] = moved[index, 1, ::-1]
    return np.moveaxis(moved, (0, 1, 2), (factor_axis, control_axis, target_axis))


def run_network(spec, assignment, data, M=DEFAULT_MOMENTUM_RESOLUTION):
    """Exécute les slots dans l'ordre ; une variable continue de valeur p contribue θ_axe(p / M)
    sur son qubit, de façon conditionnelle quand la variable est en superposition."""
    if data.size != 2 ** spec.n:
        raise DimensionError(f"Registre de données de taille {data.size}, attendu {2 ** spec.n}")

    factors = spec.program_factors
    resolved = [assignment.resolve(factor_id, role, M) for factor_id, role in factors]
    index_of = {factor_id: position for position, (factor_id, _) in enumerate(factors)}
    offset = len(factors)

    tensor = data.amplitudes.reshape((2,) * spec.n)
    for _, amplitudes in reversed(resolved):
        tensor = np.multiply.outer(amplitudes, tensor)

    for slot in spec.slots:
        if isinstance(slot, RotationSlot):
            for axis, var in zip((1, 2, 3), slot.vars):
                position = index_of[var]
                gates = theta_stack(axis, resolved[position][0] / M)
                tensor = _apply_conditioned_rotation(tensor, position, offset + slot.qubit, gates)
        else:
            position = index_of[slot.control_bit]
            tensor = _apply_conditioned_cnot(
                tensor, position, offset + slot.control, offset + slot.target, resolved[position][0]
            )

    logger.debug(f"Réseau exécuté : {len(spec.slots)} slots, {len(factors)} facteurs programme, M={M}")
    return NetworkResult(
        factor_ids=tuple(factor_id for factor_id, _ in factors),
        roles=tuple(role for _, role in factors),
        program_dims=tuple(M if role is FactorRole.PROGRAM_CONTINUOUS else 2 for _, role in factors),
        supports=tuple(support for support, _ in resolved),
        program_amplitudes=tuple(amplitudes for _, amplitudes in resolved),
        amplitudes=tensor,
        n=spec.n,
        coordinates=ProgramCoordinates.MOMENTUM,
    )


def network_unitary(spec, assignment, M=DEFAULT_MOMENTUM_RESOLUTION):
    """Unitaire effectif sur les données pour un programme de base."""
    U = np.eye(2 ** spec.n, dtype=complex)
    for slot in spec.slots:
        if isinstance(slot, RotationSlot):
            for axis, var in zip((1, 2, 3), slot.vars):
                support, _ = assignment.resolve(var, FactorRole.PROGRAM_CONTINUOUS, M)
                if support.size != 1:
                    raise DimensionError(f"'{var}' en superposition : pas d'unitaire effectif")
                U = embed_single_qubit(theta_matrix(axis, support[0] / M), slot.qubit, spec.n).matrix @ U
        else:
            support, _ = assignment.resolve(slot.control_bit, FactorRole.PROGRAM_DISCRETE, M)
            if support.size != 1:
                raise DimensionError(f"'{slot.control_bit}' en superposition : pas d'unitaire effectif")
            if support[0] == 1:
                U = cnot(slot.control, slot.target, spec.n).matrix @ U
    return Unitary(U)


def program_data_cut(state, n_program_factors):
    """Coupure programme | données pour un état joint dont les facteurs programme viennent d'abord."""
    return BipartiteCut.from_left(range(n_program_factors), len(state.dims))
