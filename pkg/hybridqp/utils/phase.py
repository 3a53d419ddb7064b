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

"""Alignement de phase globale : une phase globale n'est pas observable, on compare
donc deux matrices (ou vecteurs) après alignement optimal de phase."""

import numpy as np
from scipy.optimize import minimize_scalar


def _max_distance(phase, a, b):
    return float(np.max(np.abs(np.exp(1j * phase) * a - b)))


def phase_aligned_distance(a, b):
    """min sur φ de ||e^{iφ}·a - b||_max.

    Départ : phase qui minimise la distance de Frobenius (argument de <a, b>),
    puis affinage borné de la norme max autour de ce point.
    """
    a = np.asarray(getattr(a, 'matrix', getattr(a, 'amplitudes', a)), dtype=complex)
    b = np.asarray(getattr(b, 'matrix', getattr(b, 'amplitudes', b)), dtype=complex)
    overlap = np.vdot(a, b)
    start = float(np.angle(overlap)) if abs(overlap) > 0 else 0.0
    best = _max_distance(start, a, b)
    if best == 0.0:
        return best

    refined = minimize_scalar(
        lambda delta: _max_distance(start + delta, a, b),
        bounds=(-0.5, 0.5),
        method='bounded',
        options={'xatol': 1e-14},
    )
    return min(best, float(refined.fun))
