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

"""Exceptions de HybridQP."""


class HybridQPError(ValueError):
    """Erreur de base de la bibliothèque."""


class DimensionError(HybridQPError):
    """Dimensions incompatibles, indice hors limites ou coupure invalide."""


class DomainError(HybridQPError):
    """Paramètre hors de son domaine (axe, taille de registre, domaine d'une famille...)."""


class UnitarityError(HybridQPError):
    """Matrice non unitaire : `deviation` vaut ||U†U - I||_max."""

    def __init__(self, message, deviation):
        super().__init__(message)
        self.deviation = deviation


class NormalizationError(HybridQPError):
    """Vecteur non normalisé : `deviation` vaut | ||v|| - 1 |."""

    def __init__(self, message, deviation):
        super().__init__(message)
        self.deviation = deviation


class DocumentError(HybridQPError):
    """Document d'expérience invalide ; `field` nomme le champ fautif."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.detail = message
