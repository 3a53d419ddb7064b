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

"""Substrat d'algèbre linéaire : vecteurs d'état, produit tensoriel, DFT position/impulsion,
analyse de Schmidt et démonstration du commutateur en dimension finie.

Convention d'ordre : pour un état à plusieurs facteurs, le PREMIER facteur listé est
l'indice qui varie le plus lentement (ordre ligne de numpy.reshape).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError, DomainError, NormalizationError, UnitarityError

logger = logging.getLogger(__name__)

# Tolérances : invariants (normes, unitarité) et identités algébriques exactes
NORM_TOL = 1e-10
EXACT_TOL = 1e-12
SCHMIDT_RANK_THRESHOLD = 1e-9


class FactorRole(Enum):
    DATA_QUBIT = 'data-qubit'
    PROGRAM_DISCRETE = 'program-discrete'
    PROGRAM_CONTINUOUS = 'program-continuous'


def _default_roles(dims):
    # Qubit de données pour les facteurs de dimension 2, registre programme discret sinon
    return tuple(
        FactorRole.DATA_QUBIT if d == 2 else FactorRole.PROGRAM_DISCRETE
        for d in dims
    )


@dataclass(frozen=True, eq=False)
class StateVector:
    """Vecteur d'amplitudes normalisé sur une structure de facteurs étiquetés."""

    amplitudes: np.ndarray
    dims: Tuple[int, ...]
    labels: Tuple[FactorRole, ...] = field(default=None)

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"Dimensions invalides : {dims}")
        if int(np.prod(dims)) != amplitudes.size:
            raise DimensionError(
                f"Le produit des dimensions {dims} ne correspond pas aux {amplitudes.size} amplitudes"
            )
        labels = _default_roles(dims) if self.labels is None else tuple(
            FactorRole(label) for label in self.labels
        )
        if len(labels) != len(dims):
            raise DimensionError(f"{len(labels)} étiquettes pour {len(dims)} facteurs")

        deviation = abs(np.linalg.norm(amplitudes) - 1.0)
        if deviation > NORM_TOL:
            raise NormalizationError(f"État non normalisé (écart {deviation:.3e})", deviation)

        amplitudes.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amplitudes)
        object.__setattr__(self, 'dims', dims)
        object.__setattr__(self, 'labels', labels)

    @classmethod
    def normalized(cls, amplitudes, dims, labels=None):
        """Construit l'état après renormalisation des amplitudes."""
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amplitudes)
        if norm == 0:
            raise NormalizationError("Vecteur nul : impossible de normaliser", 1.0)
        return cls(amplitudes / norm, dims, labels)

    @property
    def size(self):
        return self.amplitudes.size

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other):
        """Produit scalaire <self|other>."""
        if self.size != other.size:
            raise DimensionError(f"Produit scalaire entre tailles {self.size} et {other.size}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self):
        """Amplitudes vues comme tenseur de forme `dims`."""
        return self.amplitudes.reshape(self.dims)

    def __repr__(self):
        roles = ', '.join(label.value for label in self.labels)
        return f"StateVector(dims={self.dims}, labels=[{roles}])"


@dataclass(frozen=True, eq=False)
class Unitary:
    """Matrice carrée complexe dont l'unitarité est certifiée à `tol` près."""

    matrix: np.ndarray
    tol: float = NORM_TOL

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f"Matrice non carrée : forme {matrix.shape}")
        deviation = unitarity_deviation(matrix)
        if deviation > self.tol:
            raise UnitarityError(f"Matrice non unitaire (||U†U - I||_max = {deviation:.3e})", deviation)
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def deviation(self):
        return unitarity_deviation(self.matrix)

    def dagger(self):
        return Unitary(self.matrix.conj().T, self.tol)

    def __matmul__(self, other):
        if isinstance(other, Unitary):
            return Unitary(self.matrix @ other.matrix, max(self.tol, other.tol))
        return self.matrix @ other

    def __repr__(self):
        return f"Unitary(dim={self.dim})"


def unitarity_deviation(matrix):
    """||U†U - I||_max d'une matrice carrée quelconque."""
    matrix = np.asarray(matrix, dtype=complex)
    return float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))))


@dataclass(frozen=True)
class BipartiteCut:
    """Partition des facteurs d'un état en deux blocs non vides."""

    left_factors: Tuple[int, ...]
    right_factors: Tuple[int, ...]

    @classmethod
    def from_left(cls, left_factors, n_factors):
        left = tuple(sorted(int(i) for i in left_factors))
        right = tuple(i for i in range(n_factors) if i not in left)
        return cls(left, right)

    def validate(self, n_factors):
        everything = list(self.left_factors) + list(self.right_factors)
        if not self.left_factors or not self.right_factors:
            raise DimensionError("Coupure invalide : un des deux blocs est vide")
        if sorted(everything) != list(range(n_factors)):
            raise DimensionError(
                f"Coupure invalide {self.left_factors} | {self.right_factors} pour {n_factors} facteurs"
            )


# === CONSTRUCTEURS D'ÉTATS ===

def basis_state(index, dims, labels=None):
    """Vecteur de base computationnelle d'indice global `index`."""
    dims = tuple(dims) if isinstance(dims, (tuple, list)) else (int(dims),)
    size = int(np.prod(dims))
    if not 0 <= index < size:
        raise DimensionError(f"Indice de base {index} hors de [0, {size})")
    amplitudes = np.zeros(size, dtype=complex)
    amplitudes[index] = 1.0
    return StateVector(amplitudes, dims, labels)


def uniform_state(M, labels=None):
    return StateVector(np.full(M, 1.0 / np.sqrt(M), dtype=complex), (M,), labels)


def momentum_state(p, M, labels=None):
    """|p̃> en représentation position : amplitudes e^{2πi p j / M} / √M."""
    if not 0 <= p < M:
        raise DomainError(f"Impulsion {p} hors de [0, {M})")
    j = np.arange(M)
    return StateVector(np.exp(2j * np.pi * p * j / M) / np.sqrt(M), (M,), labels)


def random_state(dims, rng, labels=None):
    """État aléatoire (gaussienne complexe normalisée, loi invariante unitaire)."""
    dims = tuple(dims)
    size = int(np.prod(dims))
    raw = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return StateVector.normalized(raw, dims, labels)


# === OPÉRATIONS ===

def tensor_product(a, b):
    """a ⊗ b ; le facteur de gauche est l'indice lent."""
    return StateVector(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims, a.labels + b.labels)


def _check_factor(state, factor):
    if not 0 <= factor < len(state.dims):
        raise DimensionError(f"Facteur {factor} hors de [0, {len(state.dims)})")


def dft(state, factor=0):
    """c̃_p = (1/√M) Σ_j e^{-2πi p j / M} c_j sur le facteur choisi."""
    _check_factor(state, factor)
    transformed = np.fft.fft(state.tensor(), axis=factor, norm='ortho')
    return StateVector(transformed.reshape(-1), state.dims, state.labels)


def inverse_dft(state, factor=0):
    _check_factor(state, factor)
    transformed = np.fft.ifft(state.tensor(), axis=factor, norm='ortho')
    return StateVector(transformed.reshape(-1), state.dims, state.labels)


def dft_matrix(M):
    """Matrice F telle que dft(v) = F v."""
    return np.fft.fft(np.eye(M, dtype=complex), axis=0, norm='ortho')


def apply_to_factor(state, matrix, factor):
    """Applique une matrice d×d au facteur `factor` d'un état."""
    _check_factor(state, factor)
    matrix = matrix.matrix if isinstance(matrix, Unitary) else np.asarray(matrix, dtype=complex)
    d = state.dims[factor]
    if matrix.shape != (d, d):
        raise DimensionError(f"Matrice {matrix.shape} appliquée à un facteur de dimension {d}")
    moved = np.tensordot(matrix, state.tensor(), axes=([1], [factor]))
    result = np.moveaxis(moved, 0, factor)
    return StateVector(result.reshape(-1), state.dims, state.labels)


def schmidt_coefficients(state, cut):
    """Coefficients de Schmidt (décroissants) de `state` à travers la coupure `cut`."""
    cut.validate(len(state.dims))
    order = list(cut.left_factors) + list(cut.right_factors)
    left_dim = int(np.prod([state.dims[i] for i in cut.left_factors]))
    matrix = np.transpose(state.tensor(), order).reshape(left_dim, -1)
    return np.linalg.svd(matrix, compute_uv=False)


def schmidt_rank(coefficients, threshold=SCHMIDT_RANK_THRESHOLD):
    return int(np.count_nonzero(np.asarray(coefficients) > threshold))


def spectrum_entropy(coefficients, base=2):
    """-Σ λ² log λ² pour une liste de coefficients de Schmidt."""
    weights = np.asarray(coefficients, dtype=float) ** 2
    weights = weights[weights > 1e-300]
    return max(0.0, float(-np.sum(weights * np.log(weights)) / np.log(base)))


def entanglement_entropy(state, cut, base=2):
    """Entropie de von Neumann du spectre de Schmidt."""
    return spectrum_entropy(schmidt_coefficients(state, cut), base)


@dataclass(frozen=True)
class CommutatorDefect:
    trace_of_commutator: complex
    trace_of_identity: float
    max_deviation_from_identity: float


def commutator_defect(D):
    """i Tr[P, Q] = 0 pour des matrices D×D, alors que Tr(1) = D.

    Q est la grille diagonale 2πj/D ; P est le conjugué par DFT de la matrice
    diagonale des impulsions entières 0..D-1.
    """
    if D < 2:
        raise DomainError(f"Dimension {D} < 2 pour la démonstration du commutateur")
    F = dft_matrix(D)
    Q = np.diag(2 * np.pi * np.arange(D) / D).astype(complex)
    P = F.conj().T @ np.diag(np.arange(D)).astype(complex) @ F
    commutator = P @ Q - Q @ P
    identity = np.eye(D)
    defect = CommutatorDefect(
        trace_of_commutator=complex(1j * np.trace(commutator)),
        trace_of_identity=float(np.trace(identity)),
        max_deviation_from_identity=float(np.max(np.abs(1j * commutator - identity))),
    )
    logger.debug(f"Commutateur D={D} : trace {defect.trace_of_commutator:.3e}")
    return defect
