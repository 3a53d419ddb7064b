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

"""Constructeurs de portes : famille θ_k(q) = exp(2πi q σ_k), CNOT, plongement dans un
registre de n qubits et compilation d'une porte 2×2 en trois angles θ1, θ2, θ3.

Le qubit 0 est le facteur le plus lent (bit de poids fort de l'indice global).
"""

import logging
from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from scipy.stats import unitary_group

from .errors import DimensionError, DomainError, UnitarityError
from .qstate import NORM_TOL, Unitary, unitarity_deviation

logger = logging.getLogger(__name__)

IDENTITY = np.eye(2, dtype=complex)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)

PAULI = {1: SIGMA_1, 2: SIGMA_2, 3: SIGMA_3}

# En deçà de ce seuil on considère l'angle du milieu bloqué (gimbal lock)
GIMBAL_TOL = 1e-12

# Un paramètre à moins de ANGLE_SNAP de la demi-période est ramené à 0
ANGLE_SNAP = 1e-14


class Axis(IntEnum):
    X = 1
    Y = 2
    Z = 3


def canonical_phase(q, period=1.0):
    """Représentant de q dans [0, period)."""
    value = float(q) % period
    # -1e-17 % 1.0 vaut 1.0 en flottants
    return 0.0 if value >= period else value


@dataclass(frozen=True)
class AngleTriple:
    """(q1, q2, q3) appliqués dans l'ordre θ1, puis θ2, puis θ3."""

    q1: float
    q2: float
    q3: float

    def __post_init__(self):
        for name in ('q1', 'q2', 'q3'):
            object.__setattr__(self, name, canonical_phase(getattr(self, name)))

    def as_tuple(self):
        return (self.q1, self.q2, self.q3)

    def __iter__(self):
        return iter(self.as_tuple())


def _check_axis(k):
    try:
        return Axis(int(k))
    except ValueError:
        raise DomainError(f"Axe {k} invalide : attendu 1, 2 ou 3")


def theta_matrix(k, q):
    """cos(2πq)·I + i·sin(2πq)·σ_k, sans certification d'unitarité."""
    axis = _check_axis(k)
    angle = 2 * np.pi * float(q)
    return np.cos(angle) * IDENTITY + 1j * np.sin(angle) * PAULI[axis]


def theta_gate(k, q):
    return Unitary(theta_matrix(k, q))


def theta_stack(k, qs):
    """Pile (len(qs), 2, 2) des matrices θ_k(q) pour un tableau de paramètres."""
    axis = _check_axis(k)
    angles = 2 * np.pi * np.asarray(qs, dtype=float).reshape(-1)
    return (np.cos(angles)[:, None, None] * IDENTITY
            + 1j * np.sin(angles)[:, None, None] * PAULI[axis])


def cnot(control, target, n):
    """Matrice de permutation 2^n × 2^n qui inverse `target` quand `control` vaut 1."""
    if control == target:
        raise DimensionError(f"Contrôle et cible identiques ({control})")
    for name, index in (('control', control), ('target', target)):
        if not 0 <= index < n:
            raise DimensionError(f"Qubit {name}={index} hors de [0, {n})")

    size = 2 ** n
    indices = np.arange(size)
    control_set = (indices >> (n - 1 - control)) & 1
    images = np.where(control_set == 1, indices ^ (1 << (n - 1 - target)), indices)
    matrix = np.zeros((size, size), dtype=complex)
    matrix[images, indices] = 1.0
    return Unitary(matrix)


def embed_single_qubit(u, target, n):
    """I ⊗ ... ⊗ u ⊗ ... ⊗ I avec u sur le qubit `target`."""
    if not 0 <= target < n:
        raise DimensionError(f"Qubit cible {target} hors de [0, {n})")
    matrix = u.matrix if isinstance(u, Unitary) else np.asarray(u, dtype=complex)
    if matrix.shape != (2, 2):
        raise DimensionError(f"Porte à un qubit attendue, forme {matrix.shape}")
    full = np.kron(np.kron(np.eye(2 ** target), matrix), np.eye(2 ** (n - 1 - target)))
    return Unitary(full)


# === COMPILATION SU(2) ===

def _rx_dagger(alpha):
    # Rx(α)† = cos(α/2)·I + i·sin(α/2)·σ1
    return np.cos(alpha / 2) * IDENTITY + 1j * np.sin(alpha / 2) * SIGMA_1


def _half_period_parameter(angle):
    q = canonical_phase(-angle / (4 * np.pi), period=0.5)
    return 0.0 if 0.5 - q < ANGLE_SNAP else q


def compile_su2(target):
    """Angles (q1, q2, q3) tels que θ3(q3)·θ2(q2)·θ1(q1) = target à une phase globale près.

    Avec θ_k(q) = R_k(-4πq) on cherche la factorisation Rz(γ)·Ry(β)·Rx(α) du représentant
    spécial unitaire V. α annule la partie imaginaire de a·b dans V·Rx(α)† = [[a, .], [b, .]],
    ce qui rend le reste exactement de la forme Rz(γ)·Ry(β). Angle du milieu bloqué : q1 = 0.
    Chaque θ_k(q + 1/2) = -θ_k(q), les angles sont donc réduits dans [0, 1/2).
    """
    matrix = target.matrix if isinstance(target, Unitary) else np.asarray(target, dtype=complex)
    if matrix.shape != (2, 2):
        raise DimensionError(f"Matrice 2×2 attendue, forme {matrix.shape}")
    deviation = unitarity_deviation(matrix)
    if deviation > NORM_TOL:
        raise UnitarityError(f"Compilation impossible : ||U†U - I||_max = {deviation:.3e}", deviation)

    special = matrix / np.sqrt(np.linalg.det(matrix))
    v0, v1 = special[0, 0], special[1, 0]
    imaginary = -2 * np.imag(v0 * v1)
    balance = abs(v0) ** 2 - abs(v1) ** 2
    if np.hypot(imaginary, balance) < GIMBAL_TOL:
        alpha = 0.0
    else:
        alpha = float(np.arctan2(imaginary, balance))

    rest = special @ _rx_dagger(alpha)
    a, b = rest[0, 0], rest[1, 0]
    if abs(a) >= abs(b):
        gamma = -2 * float(np.angle(a))
        cos_half, sin_half = abs(a), float(np.real(b * np.exp(-0.5j * gamma)))
    else:
        gamma = 2 * float(np.angle(b))
        cos_half, sin_half = float(np.real(a * np.exp(0.5j * gamma))), abs(b)
    beta = 2 * float(np.arctan2(sin_half, cos_half))

    angles = [_half_period_parameter(angle) for angle in (alpha, beta, gamma)]
    logger.debug(f"compile_su2 -> {angles}")
    return AngleTriple(*angles)


def rebuild_su2(angles):
    """θ3(q3)·θ2(q2)·θ1(q1)."""
    q1, q2, q3 = angles
    return Unitary(theta_matrix(3, q3) @ theta_matrix(2, q2) @ theta_matrix(1, q1))


def random_special_unitary(rng):
    """Tirage de Haar dans SU(2)."""
    matrix = unitary_group.rvs(2, random_state=rng)
    return Unitary(matrix / np.sqrt(np.linalg.det(matrix)))


# === PONT AVEC LA CONVENTION DES ROTATIONS DE PHASE ===

def theta_from_alpha(alpha):
    """R(α) = diag(e^{iα/2}, e^{-iα/2}) coïncide avec θ3(α / 4π)."""
    return float(alpha) / (4 * np.pi)


def alpha_from_theta(q):
    return 4 * np.pi * float(q)
