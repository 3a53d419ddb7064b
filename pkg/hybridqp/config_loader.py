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

import copy
import logging
import os
from pathlib import Path

import yaml

logger = logging.getLogger(__name__)

# Variable d'environnement -> (chemin dans settings.yml, conversion)
ENV_OVERRIDES = {
    'HYBRIDQP_MOMENTUM_RESOLUTION': ('simulation.momentum_resolution', int),
    'HYBRIDQP_SEED': ('stochastic.seed', int),
    'HYBRIDQP_OUTPUT_DIR': ('output.directory', str),
    'HYBRIDQP_LOG_LEVEL': ('logging.level', str),
}


class ConfigLoader:
    """Classe pour charger les réglages depuis settings.yml et l'environnement."""

    def __init__(self, config_dir="hybridqp/content", settings_file=None):
        """
        Initialise le chargeur de configuration.

        Args:
            config_dir (str): Dossier contenant settings.yml (relatif à la racine du projet)
            settings_file (str): Chemin explicite d'un settings.yml (prioritaire, sinon HYBRIDQP_SETTINGS)
        """
        package_path = os.path.dirname(os.path.abspath(__file__))
        project_root = os.path.dirname(package_path)
        self.config_dir = Path(project_root) / config_dir

        explicit = settings_file or os.getenv('HYBRIDQP_SETTINGS')
        self.settings_file = Path(explicit) if explicit else self.config_dir / "settings.yml"
        self._settings = None
        self._source = None

    def load_settings(self):
        """Charge les réglages : valeurs par défaut, puis settings.yml, puis environnement."""
        if self._settings is not None:
            return self._settings

        settings = self._get_default_settings()
        candidates = [self.settings_file]
        if self.settings_file.name == "settings.yml":
            candidates.append(self.settings_file.with_name("settings.yml.example"))

        self._source = 'defaults'
        for candidate in candidates:
            if not candidate.exists():
                continue
            try:
                with open(candidate, 'r', encoding='utf-8') as f:
                    loaded = yaml.safe_load(f) or {}
                settings = self._merge(settings, loaded)
                self._source = str(candidate)
                break
            except Exception as e:
                logger.error(f"❌ Erreur lors du chargement de {candidate} : {e}")
                break
        else:
            logger.warning(f"⚠️ Fichier settings.yml non trouvé : {self.settings_file}")

        self._settings = self._apply_environment(settings)
        return self._settings

    def get(self, path, default=None):
        """Valeur d'un réglage à partir d'un chemin pointé (ex. 'tolerances.document_norm')."""
        value = self._get_nested_value(self.load_settings(), path)
        return default if value is None else value

    def _get_nested_value(self, data, path):
        """Récupère une valeur dans un dictionnaire imbriqué à partir d'un chemin"""
        keys = path.split('.')
        current = data

        try:
            for key in keys:
                current = current[key]
            return current
        except (KeyError, TypeError):
            return None

    def _set_nested_value(self, data, path, value):
        keys = path.split('.')
        current = data
        for key in keys[:-1]:
            current = current.setdefault(key, {})
        current[keys[-1]] = value

    def _merge(self, base, override):
        """Fusion récursive : les clés de `override` remplacent celles de `base`."""
        result = copy.deepcopy(base)
        for key, value in override.items():
            if isinstance(value, dict) and isinstance(result.get(key), dict):
                result[key] = self._merge(result[key], value)
            else:
                result[key] = value
        return result

    def _apply_environment(self, settings):
        for var_name, (path, convert) in ENV_OVERRIDES.items():
            raw = os.getenv(var_name)
            if raw is None or raw == '':
                continue
            try:
                self._set_nested_value(settings, path, convert(raw))
            except (ValueError, TypeError):
                # valeur mal formée : on garde celle du fichier
                logger.warning(f"⚠️ {var_name}={raw!r} ignorée (valeur invalide)")
        return settings

    def reload_all_configs(self):
        """Force le rechargement de la configuration."""
        try:
            self._settings = None
            settings = self.load_settings()
            return {
                'success': True,
                'message': 'Configuration rechargée avec succès',
                'details': {
                    'sections': len(settings.keys()),
                    'source': self._source,
                }
            }
        except Exception as e:
            return {
                'success': False,
                'message': f'Erreur lors du rechargement: {str(e)}',
                'details': {}
            }

    def get_config_status(self):
        """Retourne le statut actuel de la configuration."""
        return {
            'settings_yml': {
                'loaded': self._settings is not None,
                'file_exists': self.settings_file.exists(),
                'path': str(self.settings_file),
                'source': self._source,
                'sections': len(self._settings.keys()) if self._settings else 0,
            },
            'environment': {
                var_name: os.getenv(var_name) for var_name in ENV_OVERRIDES if os.getenv(var_name)
            },
        }

    def _get_default_settings(self):
        """Réglages par défaut si settings.yml n'existe pas"""
        return {
            'simulation': {
                'momentum_resolution': 256,
                'max_dense_dimension': 4096,
            },
            'tolerances': {
                'document_norm': 1e-8,
            },
            'stochastic': {
                'seed': 20010601,
                'trials': 100000,
                'batch_size': 20000,
                'workers': 1,
            },
            'verification': {
                'random_instances': 20,
                'max_dft_size': 64,
                'max_commutator_dim': 64,
                'monte_carlo_trials': 100000,
            },
            'output': {
                'directory': 'output',
            },
            'logging': {
                'level': 'WARNING',
            },
        }
