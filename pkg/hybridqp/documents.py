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

"""Documents d'expérience (JSON, ou YAML) : chargement et validation avant exécution.

Nombres complexes : paires [re, im] (un réel seul est accepté). États : liste d'amplitudes
dans l'ordre des facteurs, {"basis": indice} ou une notation ket "|01>".
"""

import json
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
import yaml

from .errors import DocumentError, HybridQPError
from .processor import NetworkSpec, ProgramAssignment, RotationSlot, TwoQubitSlot, canonical_network

logger = logging.getLogger(__name__)

KET_PATTERN = re.compile(r'^\|\s*([0-9]+)\s*(?:>|⟩)$')


class ExperimentKind(Enum):
    CONDITIONAL = 'conditional'
    NETWORK = 'network'
    STOCHASTIC_SWEEP = 'stochastic-sweep'
    COMPILE = 'compile'


@dataclass
class ExperimentDoc:
    kind: ExperimentKind
    parameters: dict = field(default_factory=dict)
    source: str = None


def load_document(path):
    """Lit un document JSON (ou YAML selon l'extension)."""
    path = Path(path)
    if not path.exists():
        raise DocumentError('document', f"fichier introuvable : {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            if path.suffix.lower() in ('.yml', '.yaml'):
                raw = yaml.safe_load(f)
            else:
                raw = json.load(f)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise DocumentError('document', f"lecture impossible : {e}")
    if not isinstance(raw, dict):
        raise DocumentError('document', "un objet JSON est attendu à la racine")
    return raw


# === CONVERSIONS ÉLÉMENTAIRES ===

def _require(raw, key, path):
    if not isinstance(raw, dict) or key not in raw:
        raise DocumentError(f"{path}.{key}" if path else key, "champ obligatoire manquant")
    return raw[key]


def _integer(value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise DocumentError(path, f"entier attendu, reçu {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise DocumentError(path, f"doit être ≥ {minimum}, reçu {value}")
    return value


def _real(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(path, f"réel attendu, reçu {value!r}")
    return float(value)


def parse_complex(value, path):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(_real(value[0], f"{path}[0]"), _real(value[1], f"{path}[1]"))
    raise DocumentError(path, f"nombre complexe [re, im] attendu, reçu {value!r}")


def _ket_index(label, dim, path):
    match = KET_PATTERN.match(label.strip())
    if not match:
        raise DocumentError(path, f"notation ket invalide : {label!r}")
    digits = match.group(1)
    width = int(round(np.log2(dim))) if dim > 1 and dim & (dim - 1) == 0 else None
    if width and len(digits) == width and set(digits) <= {'0', '1'}:
        index = int(digits, 2)
    else:
        index = int(digits)
    if not 0 <= index < dim:
        raise DocumentError(path, f"{label} hors de la dimension {dim}")
    return index


def parse_amplitudes(value, dim, path, tolerance=1e-8):
    """Vecteur normalisé de dimension `dim` ; un écart de norme > tolérance est renormalisé avec avertissement."""
    if isinstance(value, str):
        amplitudes = np.zeros(dim, dtype=complex)
        amplitudes[_ket_index(value, dim, path)] = 1.0
        return amplitudes
    if isinstance(value, dict):
        index = _integer(_require(value, 'basis', path), f"{path}.basis", minimum=0)
        if index >= dim:
            raise DocumentError(f"{path}.basis", f"indice {index} hors de [0, {dim})")
        amplitudes = np.zeros(dim, dtype=complex)
        amplitudes[index] = 1.0
        return amplitudes
    if not isinstance(value, (list, tuple)):
        raise DocumentError(path, "liste d'amplitudes, {\"basis\": i} ou ket attendu")
    if len(value) != dim:
        raise DocumentError(path, f"{len(value)} amplitudes, attendu {dim}")

    amplitudes = np.array([parse_complex(v, f"{path}[{i}]") for i, v in enumerate(value)], dtype=complex)
    norm = np.linalg.norm(amplitudes)
    if norm == 0:
        raise DocumentError(path, "vecteur nul")
    if abs(norm - 1.0) > tolerance:
        logger.warning(f"⚠️ {path} : norme {norm:.6g}, amplitudes renormalisées")
    return amplitudes / norm


def parse_matrix(value, dim, path):
    if not isinstance(value, (list, tuple)) or len(value) != dim:
        raise DocumentError(path, f"matrice {dim}×{dim} attendue (liste de {dim} lignes)")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, (list, tuple)) or len(row) != dim:
            raise DocumentError(f"{path}[{i}]", f"ligne de {dim} coefficients attendue")
        rows.append([parse_complex(entry, f"{path}[{i}][{j}]") for j, entry in enumerate(row)])
    return np.array(rows, dtype=complex)


# === VALIDATION PAR TYPE D'EXPÉRIENCE ===

def _parse_conditional(raw, tolerance):
    dims = _require(raw, 'dims', '')
    M = _integer(_require(dims, 'program', 'dims'), 'dims.program', minimum=1)
    N = _integer(_require(dims, 'data', 'dims'), 'dims.data', minimum=1)

    basis = raw.get('basis', 'computational')
    if basis not in ('computational', 'momentum'):
        raise DocumentError('basis', f"'computational' ou 'momentum' attendu, reçu {basis!r}")

    if 'blocks' in raw:
        blocks = raw['blocks']
        if not isinstance(blocks, list) or len(blocks) != M:
            raise DocumentError('blocks', f"{M} blocs attendus")
        blocks = [parse_matrix(block, N, f"blocks[{P}]") for P, block in enumerate(blocks)]
        family = None
    elif 'family' in raw:
        family = raw['family']
        axis = _integer(_require(family, 'axis', 'family'), 'family.axis', minimum=1)
        if axis > 3 or N != 2:
            raise DocumentError('family.axis', "famille θ_k : axe 1, 2 ou 3 et dims.data = 2")
        family = {'gate': 'theta', 'axis': axis}
        blocks = None
    else:
        raise DocumentError('blocks', "champ obligatoire manquant ('blocks' ou 'family')")

    return {
        'M': M,
        'N': N,
        'basis': basis,
        'blocks': blocks,
        'family': family,
        'program': parse_amplitudes(_require(raw, 'program', ''), M, 'program', tolerance),
        'data': parse_amplitudes(_require(raw, 'data', ''), N, 'data', tolerance),
    }


def _parse_slot(raw, path):
    if not isinstance(raw, dict):
        raise DocumentError(path, "objet attendu")
    kind = _require(raw, 'type', path)
    if kind == 'rotation':
        variables = _require(raw, 'vars', path)
        if not isinstance(variables, list) or len(variables) != 3:
            raise DocumentError(f"{path}.vars", "trois identifiants attendus")
        return RotationSlot(_integer(_require(raw, 'qubit', path), f"{path}.qubit", minimum=0),
                            tuple(str(v) for v in variables))
    if kind == 'cnot':
        return TwoQubitSlot(str(_require(raw, 'control_bit', path)),
                            _integer(_require(raw, 'control', path), f"{path}.control", minimum=0),
                            _integer(_require(raw, 'target', path), f"{path}.target", minimum=0))
    raise DocumentError(f"{path}.type", f"'rotation' ou 'cnot' attendu, reçu {kind!r}")


def _parse_program_value(value, dim, path, tolerance):
    if isinstance(value, bool):
        raise DocumentError(path, f"valeur invalide {value!r}")
    if isinstance(value, (int, float)):
        index = _integer(value, path, minimum=0)
        if index >= dim:
            raise DocumentError(path, f"valeur {index} hors de [0, {dim})")
        return index
    if isinstance(value, dict) and 'sparse' in value:
        sparse = value['sparse']
        if not isinstance(sparse, dict) or not sparse:
            raise DocumentError(f"{path}.sparse", "dictionnaire {valeur: amplitude} attendu")
        entries = {}
        for key, amplitude in sparse.items():
            index = _integer(int(key) if str(key).isdigit() else key, f"{path}.sparse.{key}", minimum=0)
            if index >= dim:
                raise DocumentError(f"{path}.sparse.{key}", f"valeur hors de [0, {dim})")
            entries[index] = parse_complex(amplitude, f"{path}.sparse.{key}")
        norm = np.sqrt(sum(abs(a) ** 2 for a in entries.values()))
        if norm == 0:
            raise DocumentError(f"{path}.sparse", "vecteur nul")
        if abs(norm - 1.0) > tolerance:
            logger.warning(f"⚠️ {path} : norme {norm:.6g}, amplitudes renormalisées")
        return {index: amplitude / norm for index, amplitude in entries.items()}
    return parse_amplitudes(value, dim, path, tolerance)


def _parse_network(raw, tolerance, default_resolution):
    dims = _require(raw, 'dims', '')
    n = _integer(_require(dims, 'data_qubits', 'dims'), 'dims.data_qubits', minimum=1)
    M = _integer(dims.get('momentum_resolution', default_resolution), 'dims.momentum_resolution', minimum=1)

    if raw.get('canonical', False):
        spec = canonical_network(n)
    else:
        slots = _require(raw, 'slots', '')
        if not isinstance(slots, list):
            raise DocumentError('slots', "liste attendue")
        try:
            spec = NetworkSpec(n, [_parse_slot(slot, f"slots[{i}]") for i, slot in enumerate(slots)])
        except DocumentError:
            raise
        except HybridQPError as e:
            raise DocumentError('slots', str(e))

    program = raw.get('program', {})
    if not isinstance(program, dict):
        raise DocumentError('program', "objet {identifiant: valeur} attendu")
    values = {}
    for factor_id, role in spec.program_factors:
        # variable absente : programme nul (p = 0, bit 0)
        value = program.get(factor_id, 0)
        dim = M if role.value == 'program-continuous' else 2
        values[factor_id] = _parse_program_value(value, dim, f"program.{factor_id}", tolerance)
    unknown = sorted(set(program) - set(values))
    if unknown:
        raise DocumentError(f"program.{unknown[0]}", "variable absente du réseau")

    return {
        'n': n,
        'M': M,
        'spec': spec,
        'assignment': ProgramAssignment(values),
        'data': parse_amplitudes(_require(raw, 'data', ''), 2 ** n, 'data', tolerance),
    }


def _parse_stage_range(value, path):
    if isinstance(value, dict):
        start = _integer(_require(value, 'start', path), f"{path}.start", minimum=1)
        stop = _integer(_require(value, 'stop', path), f"{path}.stop", minimum=start)
        return list(range(start, stop + 1))
    if isinstance(value, list) and value:
        return [_integer(v, f"{path}[{i}]", minimum=1) for i, v in enumerate(value)]
    return [_integer(value, path, minimum=1)]


def _parse_sweep(raw, tolerance, default_seed, default_trials):
    data = raw.get('data', [[2 ** -0.5, 0], [2 ** -0.5, 0]])
    if isinstance(data, list):
        size = len(data)
    else:
        dims = raw.get('dims', {})
        size = 2 ** _integer(dims.get('data_qubits', 1), 'dims.data_qubits', minimum=1)
    n = int(size).bit_length() - 1
    if size < 2 or 2 ** n != size:
        raise DocumentError('data', f"{size} amplitudes : une puissance de 2 (≥ 2) est attendue")
    target = _integer(raw.get('target', 0), 'target', minimum=0)
    if target >= n:
        raise DocumentError('target', f"qubit {target} hors de [0, {n})")
    return {
        'stages': _parse_stage_range(_require(raw, 'm', ''), 'm'),
        'alpha': _real(_require(raw, 'alpha', ''), 'alpha'),
        'trials': _integer(raw.get('trials', default_trials), 'trials', minimum=1),
        'seed': _integer(raw.get('seed', default_seed), 'seed', minimum=0),
        'n': n,
        'target': target,
        'data': parse_amplitudes(data, size, 'data', tolerance),
    }


def _parse_compile(raw):
    return {'matrix': parse_matrix(_require(raw, 'matrix', ''), 2, 'matrix')}


def parse_document(raw, settings=None, source=None):
    """Valide un document brut et renvoie l'ExperimentDoc correspondant."""
    settings = settings or {}
    tolerance = settings.get('tolerances', {}).get('document_norm', 1e-8)
    simulation = settings.get('simulation', {})
    stochastic = settings.get('stochastic', {})

    kind_value = _require(raw, 'kind', '')
    try:
        kind = ExperimentKind(kind_value)
    except ValueError:
        allowed = ', '.join(k.value for k in ExperimentKind)
        raise DocumentError('kind', f"{kind_value!r} inconnu (attendu : {allowed})")

    if kind is ExperimentKind.CONDITIONAL:
        parameters = _parse_conditional(raw, tolerance)
    elif kind is ExperimentKind.NETWORK:
        parameters = _parse_network(raw, tolerance, simulation.get('momentum_resolution', 256))
    elif kind is ExperimentKind.STOCHASTIC_SWEEP:
        parameters = _parse_sweep(raw, tolerance, stochastic.get('seed', 0), stochastic.get('trials', 100000))
    else:
        parameters = _parse_compile(raw)

    logger.debug(f"Document {source or '<mémoire>'} validé ({kind.value})")
    return ExperimentDoc(kind, parameters, source)
