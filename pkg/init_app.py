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


#!/usr/bin/env python3
"""Script d'initialisation de l'environnement de simulation."""

import os
import sys
import subprocess
import shutil
from pathlib import Path

from dotenv import load_dotenv

INTEGER_VARS = ['HYBRIDQP_MOMENTUM_RESOLUTION', 'HYBRIDQP_SEED']


def print_step(step, message):
    print(f"[INIT] ÉTAPE {step}: {message}")


def install_dependencies():
    """Installe les dépendances Python."""
    print("📦 Installation des dépendances...")
    try:
        subprocess.run([
            sys.executable, '-m', 'pip', 'install', '--no-cache-dir', '-r', 'requirements.txt'
        ], check=True)
        print("✓ Dépendances installées")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ Erreur lors de l'installation des dépendances: {e}")
        return False
    except FileNotFoundError:
        print("❌ Fichier requirements.txt non trouvé")
        return False


def validate_environment():
    """Vérifie que les surcharges numériques de l'environnement sont des entiers."""
    invalid = []
    for var in INTEGER_VARS:
        value = os.getenv(var)
        if value and not value.strip().isdigit():
            invalid.append(f"{var}={value}")

    if invalid:
        print(f"❌ Variables d'environnement invalides: {', '.join(invalid)}")
        return False

    print("✓ Variables d'environnement validées")
    return True


def sync_content_templates():
    """Copie les fichiers modèles .example vers leur nom final si absents."""
    project_root = Path(__file__).resolve().parent
    content_dir = project_root / 'hybridqp' / 'content'

    if not content_dir.exists():
        print("ℹ️  Dossier hybridqp/content introuvable, étape ignorée")
        return

    for example_file in content_dir.glob('*.example'):
        target_file = content_dir / example_file.stem

        if target_file.exists():
            print(f"ℹ️  {target_file.name} existe déjà, pas de copie")
        else:
            shutil.copy(example_file, target_file)
            print(f"✓ {target_file.name} créé depuis {example_file.name}")


def create_directories():
    """Crée le dossier de sortie des rapports."""
    from hybridqp.config_loader import ConfigLoader

    output_dir = ConfigLoader().get('output.directory', 'output')
    Path(output_dir).mkdir(parents=True, exist_ok=True)
    print(f"✓ Dossier de sortie prêt : {output_dir}")


def validate_experiments():
    """Valide les documents d'exemple du dossier experiments/."""
    from hybridqp.config_loader import ConfigLoader
    from hybridqp.documents import load_document, parse_document
    from hybridqp.errors import HybridQPError

    settings = ConfigLoader().load_settings()
    documents = sorted(Path('experiments').glob('*.json'))
    if not documents:
        print("ℹ️  Aucun document d'expérience à valider")
        return True

    ok = True
    for path in documents:
        try:
            doc = parse_document(load_document(path), settings, source=str(path))
            print(f"✓ {path.name} ({doc.kind.value})")
        except HybridQPError as e:
            print(f"❌ {path.name}: {e}")
            ok = False
    return ok


def main():
    """Fonction principale d'initialisation."""
    load_dotenv()
    print("[INIT] 🚀 Initialisation de HybridQP")
    print("[INIT] " + "=" * 50)

    # Étape 1: Installation des dépendances
    print_step(1, "Installation des dépendances")
    if not install_dependencies():
        sys.exit(1)

    # Étape 2: Validation de l'environnement
    print_step(2, "Validation de l'environnement")
    if not validate_environment():
        sys.exit(1)

    # Étape 3: Copie des fichiers de configuration par défaut
    print_step(3, "Copie des fichiers de configuration par défaut")
    sync_content_templates()

    # Étape 4: Création des dossiers
    print_step(4, "Création des dossiers")
    create_directories()

    # Étape 5: Validation des documents d'exemple
    print_step(5, "Validation des documents d'expérience")
    if not validate_experiments():
        sys.exit(1)

    print("[INIT] ✅ Initialisation terminée avec succès")
    print("[INIT] ▶️  Lancer la suite de vérification : python run.py verify")


if __name__ == "__main__":
    main()
