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

"""Porte U(1) programmable « stochastique » : états programme Φ_{α,m}, application par
mesure avec reprise à phase doublée (succès 1 - 1/M) et limite déterministe dans la base
des impulsions.

Notation binaire inversée : pour Φ_{α,m}, l'indice K = b_0 + 2 b_1 + 4 b_2 + ... où b_k est
le bit du facteur k ; le facteur k = 0 est donc le plus rapide (listé en dernier).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol, Tuple

import numpy as np

from .errors import DimensionError, DomainError
from .gates import theta_matrix
from .qstate import FactorRole, StateVector, Unitary, momentum_state

logger = logging.getLogger(__name__)

TWO_PI = 2 * np.pi

# Probabilités de branche ramenées sur la grille 2^-20 quand l'écart est au niveau de l'arrondi
PROBABILITY_GRID = 2 ** 20
PROBABILITY_SNAP = 1e-15


def canonical_alpha(alpha):
    """Représentant de α dans [0, 2π)."""
    value = float(alpha) % TWO_PI
    return 0.0 if value >= TWO_PI else value


def _check_stages(m):
    if int(m) != m or m < 1:
        raise DomainError(f"Nombre d'étages m={m} invalide (m ≥ 1)")
    return int(m)


@dataclass(frozen=True)
class CascadeProgram:
    """Programme de la cascade ; `alpha` n'est pas réduit, |φ_a> étant de période 4π en a."""

    alpha: float
    m: int

    def __post_init__(self):
        object.__setattr__(self, 'alpha', float(self.alpha))
        object.__setattr__(self, 'm', _check_stages(self.m))

    @property
    def M(self):
        return 2 ** self.m

    @property
    def canonical_alpha(self):
        """Représentant de α dans [0, 2π) : même porte R(α), état programme égal à une phase près."""
        return canonical_alpha(self.alpha)

    def state(self):
        return phi_state(self.alpha, self.m)


# === ÉTATS PROGRAMME ===

def _phi_amplitudes(a):
    return np.array([np.exp(0.5j * a), np.exp(-0.5j * a)]) / np.sqrt(2)


def phi_single(alpha):
    """|φ_a> = (e^{ia/2}|0> + e^{-ia/2}|1>) / √2."""
    return StateVector(_phi_amplitudes(alpha), (2,), (FactorRole.PROGRAM_DISCRETE,))


def phi_state(alpha, m):
    """|Φ_{α,m}> = ⊗_k |φ_{2^k α}>, amplitude de |K> : e^{iα(M-1)/2} e^{-iKα} / √M."""
    m = _check_stages(m)
    amplitudes = np.ones(1, dtype=complex)
    for k in range(m):
        # facteur k ajouté à gauche : il devient plus lent que les précédents
        amplitudes = np.kron(_phi_amplitudes(2 ** k * alpha), amplitudes)
    return StateVector(amplitudes, (2,) * m, (FactorRole.PROGRAM_DISCRETE,) * m)


def momentum_overlap(alpha, m, p):
    """|<p̃|Φ_{α,m}>| ; vaut 1 exactement quand α ≡ -2πp/M."""
    m = _check_stages(m)
    M = 2 ** m
    if not 0 <= p < M:
        raise DomainError(f"Impulsion p={p} hors de [0, {M})")
    return abs(momentum_state(p, M).inner(phi_state(alpha, m)))


def overlap_decay(alpha, beta, m):
    """|<Φ_{α,m}|Φ_{β,m}>| par produit scalaire direct."""
    return abs(phi_state(alpha, m).inner(phi_state(beta, m)))


def overlap_decay_formula(alpha, beta, m):
    """Forme produit Π_k |cos(2^k (α - β) / 2)|."""
    m = _check_stages(m)
    return float(np.prod([abs(math.cos(2 ** k * (alpha - beta) / 2)) for k in range(m)]))


def phase_rotation(alpha):
    """R(α) = diag(e^{iα/2}, e^{-iα/2}), soit θ3(α / 4π)."""
    return Unitary(np.diag([np.exp(0.5j * alpha), np.exp(-0.5j * alpha)]))


def deterministic_limit_operator(m, axis=3):
    """Σ_p |Φ_{-2πp/M,m}><Φ_{-2πp/M,m}| ⊗ θ_axis(p / M).

    Construit à partir des états programme stochastiques ; coïncide avec l'opérateur hybride
    de la base des impulsions.
    """
    M = 2 ** _check_stages(m)
    operator = np.zeros((2 * M, 2 * M), dtype=complex)
    for p in range(M):
        program = phi_state(-TWO_PI * p / M, m).amplitudes
        operator += np.kron(np.outer(program, program.conj()), theta_matrix(axis, p / M))
    return Unitary(operator)


# === SOURCES DE RÉSULTATS DE MESURE ===

class OutcomeSource(Protocol):
    def draw(self, probabilities): ...


class SeededSampler:
    """Tirage pseudo-aléatoire reproductible, un flux par (graine, indice)."""

    def __init__(self, seed, stream=0):
        self.seed = seed
        self.stream = stream
        self.rng = np.random.default_rng([int(seed), int(stream)])

    def draw(self, probabilities):
        return 0 if self.rng.random() < probabilities[0] else 1


class ForcedOutcomes:
    """Suite imposée de résultats (tests déterministes, énumération de l'arbre)."""

    def __init__(self, bits):
        self.bits = [int(bit) for bit in bits]
        self.position = 0

    def draw(self, probabilities):
        if self.position >= len(self.bits):
            raise DomainError("Suite de résultats imposés épuisée")
        bit = self.bits[self.position]
        self.position += 1
        return bit


# === APPLICATION PAR MESURE ===

@dataclass(frozen=True, eq=False)
class AttemptOutcome:
    outcome_bit: int
    branch_probability: float
    post_state: StateVector
    residual_phase: float
    probabilities: Tuple[float, float] = (0.5, 0.5)


def _check_target(data, target):
    if not 0 <= target < len(data.dims) or data.dims[target] != 2:
        raise DimensionError(f"Qubit cible {target} invalide pour un registre de dimensions {data.dims}")


def snap_probability(p):
    """p ramenée au multiple de 2^-20 le plus proche si elle en est à moins de PROBABILITY_SNAP.

    Chaque branche vaut Σ_x |ψ_x|² / 2 : les probabilités de la cascade sont dyadiques.
    """
    p = float(p)
    nearest = round(p * PROBABILITY_GRID) / PROBABILITY_GRID
    return nearest if abs(nearest - p) <= PROBABILITY_SNAP else p


def run_stages(alpha, m, stage):
    """Ordonnancement commun de la cascade : étage k à la phase 2^k α.

    `stage(k, phase)` exécute une tentative et renvoie True s'il faut poursuivre.
    Renvoie le nombre d'étages exécutés.
    """
    m = _check_stages(m)
    for k in range(m):
        if not stage(k, 2 ** k * alpha):
            return k + 1
    return m


def _attempt_branches(amplitudes, dims, target, alpha):
    """Noyau commun à une tentative isolée et aux lots Monte Carlo.

    Adjoint |φ_α> (dernier facteur), applique CNOT (cible des données -> qubit programme) et
    renvoie les deux branches non normalisées de la mesure du qubit programme avec leurs
    probabilités. `amplitudes` est de forme (..., 2^n).
    """
    target_bits = np.indices(dims).reshape(len(dims), -1)[target]
    joint = amplitudes[..., :, None] * _phi_amplitudes(alpha)
    flipped = target_bits == 1
    joint[..., flipped, :] = joint[..., flipped, ::-1]
    branches = (joint[..., 0], joint[..., 1])
    probabilities = tuple(np.sum(np.abs(branch) ** 2, axis=-1) for branch in branches)
    return branches, probabilities


def attempt(data, target, alpha, outcome_source):
    """Une tentative : résultat 0 -> R(α) appliquée ; résultat 1 -> R(-α), reste dû 2α."""
    _check_target(data, target)
    branches, probabilities = _attempt_branches(data.amplitudes, data.dims, target, alpha)
    probabilities = (snap_probability(probabilities[0]), snap_probability(probabilities[1]))
    bit = int(outcome_source.draw(probabilities))
    post = StateVector.normalized(branches[bit], data.dims, data.labels)
    return AttemptOutcome(
        outcome_bit=bit,
        branch_probability=probabilities[bit],
        post_state=post,
        residual_phase=0.0 if bit == 0 else 2 * alpha,
        probabilities=probabilities,
    )


@dataclass(frozen=True, eq=False)
class CascadeResult:
    final_state: StateVector
    success: bool
    stages_used: int
    applied_phase: float
    residual_phase: float
    probability: float
    path: Tuple[AttemptOutcome, ...] = field(default=())

    @property
    def outcome_bits(self):
        return tuple(step.outcome_bit for step in self.path)


def cascade(data, target, alpha, m, outcome_source):
    """Étage k : tentative de phase 2^k α ; arrêt au premier succès.

    Après k échecs la rotation nette vaut R(-(2^k - 1) α), la tentative suivante à 2^k α
    ramène donc à R(α). Après m échecs il reste 2^m α à appliquer.
    """
    _check_target(data, target)
    path = []
    current = {'state': data, 'applied': 0.0, 'probability': 1.0}

    def stage(k, phase):
        outcome = attempt(current['state'], target, phase, outcome_source)
        path.append(outcome)
        current['probability'] *= outcome.branch_probability
        current['state'] = outcome.post_state
        if outcome.outcome_bit == 0:
            current['applied'] += phase
            return False
        current['applied'] -= phase
        logger.debug(f"Étage {k} en échec, phase due {alpha - current['applied']:.6f}")
        return True

    stages_used = run_stages(alpha, m, stage)
    return CascadeResult(
        final_state=current['state'],
        success=path[-1].outcome_bit == 0,
        stages_used=stages_used,
        applied_phase=current['applied'],
        residual_phase=alpha - current['applied'],
        probability=current['probability'],
        path=tuple(path),
    )


def enumerate_outcome_tree(data, target, alpha, m):
    """Toutes les feuilles de l'arbre des résultats (chaque chemin est simulé)."""
    m = _check_stages(m)
    leaves = [cascade(data, target, alpha, m, ForcedOutcomes([1] * failures + [0]))
              for failures in range(m)]
    leaves.append(cascade(data, target, alpha, m, ForcedOutcomes([1] * m)))
    return leaves


def success_probability_exact(m, data=None, alpha=1.0, target=0):
    """Somme des probabilités des branches de succès de l'arbre complet."""
    if data is None:
        data = StateVector(np.array([1.0, 1.0]) / np.sqrt(2), (2,))
    leaves = enumerate_outcome_tree(data, target, alpha, m)
    return float(math.fsum(leaf.probability for leaf in leaves if leaf.success))


@dataclass(frozen=True)
class MonteCarloEstimate:
    successes: int
    trials: int

    @property
    def frequency(self):
        return self.successes / self.trials

    @property
    def standard_error(self):
        f = self.frequency
        return math.sqrt(f * (1 - f) / self.trials)


def _run_batch(data, target, alpha, m, size, seed_sequence):
    rng = np.random.default_rng(seed_sequence)
    states = np.tile(data.amplitudes, (size, 1))
    active = np.ones(size, dtype=bool)

    def stage(k, phase):
        branches, probabilities = _attempt_branches(states[active], data.dims, target, phase)
        bits = (rng.random(probabilities[0].shape) >= probabilities[0]).astype(int)
        chosen = np.where(bits[:, None] == 0, branches[0], branches[1])
        weight = np.where(bits == 0, probabilities[0], probabilities[1])
        states[active] = chosen / np.sqrt(weight)[:, None]
        indices = np.flatnonzero(active)
        active[indices[bits == 0]] = False
        return bool(active.any())

    run_stages(alpha, m, stage)
    return int(size - np.count_nonzero(active))


def monte_carlo_success(data, target, alpha, m, trials, seed, batch_size=20000, workers=1, stream=0):
    """Fréquence empirique de succès ; chaque lot a son générateur dérivé de (graine, flux, lot)."""
    m = _check_stages(m)
    _check_target(data, target)
    if trials < 1:
        raise DomainError(f"Nombre d'essais {trials} < 1")
    sizes = [min(batch_size, trials - start) for start in range(0, trials, batch_size)]
    children = np.random.SeedSequence([int(seed), int(stream)]).spawn(len(sizes))
    jobs = [(data, target, alpha, m, size, child) for size, child in zip(sizes, children)]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda job: _run_batch(*job), jobs))
    else:
        counts = [_run_batch(*job) for job in jobs]

    estimate = MonteCarloEstimate(successes=sum(counts), trials=trials)
    logger.debug(f"Monte Carlo m={m} : {estimate.successes}/{trials}")
    return estimate
