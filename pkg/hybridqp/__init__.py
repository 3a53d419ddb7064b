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

"""HybridQP : registres programme discrets et continus pilotant un registre de données."""

import logging
import sys

from .errors import (
    DimensionError,
    DocumentError,
    DomainError,
    HybridQPError,
    NormalizationError,
    UnitarityError,
)

__version__ = '1.0.0'

LOG_FORMAT = '%(asctime)s %(levelname)s [%(name)s] %(message)s'


def setup_logging(level='WARNING'):
    """Configure le logger `hybridqp` (sortie d'erreur uniquement, stdout reste aux rapports)."""
    logger = logging.getLogger('hybridqp')
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING
    logger.setLevel(level)

    for handler in logger.handlers:
        if getattr(handler, '_hybridqp', False):
            # sys.stderr a pu être remplacé depuis le premier appel
            handler.setStream(sys.stderr)
            return logger

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._hybridqp = True
    logger.addHandler(handler)
    return logger


__all__ = [
    'DimensionError',
    'DocumentError',
    'DomainError',
    'HybridQPError',
    'NormalizationError',
    'UnitarityError',
    'setup_logging',
    '__version__',
]
