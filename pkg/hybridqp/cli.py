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

"""Interface en ligne de commande : simulate, sweep, verify, compile et config.

Codes de sortie : 0 succès, 1 vérification en échec, 2 entrée invalide.
Les rapports vont sur stdout (et dans --out quand il est fourni) ; les logs vont sur stderr.
"""

import json
import logging
from pathlib import Path

import click
import numpy as np

from . import setup_logging
from .config_loader import ConfigLoader
from .documents import ExperimentKind, load_document, parse_document
from .errors import HybridQPError, UnitarityError
from .services import SimulationService, SweepService, VerificationService, dump_report

logger = logging.getLogger(__name__)

EXIT_VERIFICATION_FAILED = 1
EXIT_INPUT_ERROR = 2


class InputError(click.ClickException):
    """Entrée invalide (document, matrice, option) : code de sortie 2."""

    exit_code = EXIT_INPUT_ERROR


def _emit(ctx, text, filename):
    """Écrit le texte sur stdout et, si un dossier de sortie est configuré, dans `filename`."""
    click.echo(text, nl=False)
    out = ctx.obj.get('out')
    if not out:
        return
    directory = Path(out)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        with open(directory / filename, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        logger.info(f"✅ Résultat écrit dans {directory / filename}")
    except OSError as e:
        raise InputError(f"écriture impossible dans {directory} : {e}")


def _load(ctx, path, expected):
    try:
        doc = parse_document(load_document(path), ctx.obj['settings'], source=str(path))
    except HybridQPError as e:
        raise InputError(str(e))
    if doc.kind not in expected:
        allowed = ', '.join(kind.value for kind in expected)
        raise InputError(f"kind: '{doc.kind.value}' non accepté par cette commande (attendu : {allowed})")
    return doc


@click.group()
@click.option('--seed', type=click.IntRange(min=0), default=None, help="Graine des tirages (défaut : stochastic.seed)")
@click.option('--out', type=click.Path(file_okay=False), default=None, envvar='HYBRIDQP_OUTPUT_DIR',
              help="Dossier de sortie des rapports (défaut : $HYBRIDQP_OUTPUT_DIR)")
@click.option('--momentum-resolution', type=click.IntRange(min=1), default=None,
              help="Résolution M des variables continues (défaut : simulation.momentum_resolution)")
@click.option('--settings', 'settings_file', type=click.Path(dir_okay=False), default=None,
              help="Fichier settings.yml à utiliser")
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
              default=None, help="Niveau de log (défaut : logging.level)")
@click.pass_context
def main(ctx, seed, out, momentum_resolution, settings_file, log_level):
    """HybridQP - processeurs quantiques programmables hybrides."""
    loader = ConfigLoader(settings_file=settings_file)
    settings = loader.load_settings()
    setup_logging(log_level or settings.get('logging', {}).get('level', 'WARNING'))

    if seed is not None:
        settings['stochastic']['seed'] = seed
    if momentum_resolution is not None:
        settings['simulation']['momentum_resolution'] = momentum_resolution

    ctx.obj = {'settings': settings, 'seed': seed, 'out': out, 'loader': loader}


@main.command()
@click.argument('doc', type=click.Path(dir_okay=False))
@click.pass_context
def simulate(ctx, doc):
    """Simule un document `conditional` ou `network` (rapport JSON)."""
    experiment = _load(ctx, doc, (ExperimentKind.CONDITIONAL, ExperimentKind.NETWORK))
    try:
        report = SimulationService(ctx.obj['settings']).run(experiment)
    except HybridQPError as e:
        raise InputError(str(e))
    _emit(ctx, dump_report(report), f"{Path(doc).stem}.report.json")


@main.command()
@click.argument('doc', type=click.Path(dir_okay=False))
@click.pass_context
def sweep(ctx, doc):
    """Probabilité de succès de la cascade pour chaque m (tableau CSV)."""
    experiment = _load(ctx, doc, (ExperimentKind.STOCHASTIC_SWEEP,))
    service = SweepService(ctx.obj['settings'])
    try:
        rows = service.rows(experiment.parameters, seed=ctx.obj['seed'])
    except HybridQPError as e:
        raise InputError(str(e))
    _emit(ctx, service.to_csv(rows), f"{Path(doc).stem}.csv")


@main.command()
@click.option('--fault-inject', is_flag=True, help="Perturbe un coefficient de θ de 1e-3 (contrôle du banc)")
@click.pass_context
def verify(ctx, fault_inject):
    """Exécute la suite d'invariants ; code 1 si un invariant échoue."""
    if fault_inject:
        logger.warning("⚠️ Injection de défaut activée : θ perturbée")
    report = VerificationService(ctx.obj['settings'], seed=ctx.obj['seed'], fault_inject=fault_inject).run()
    _emit(ctx, report.render(), 'verify.txt')
    if not report.passed:
        ctx.exit(EXIT_VERIFICATION_FAILED)


@main.command(name='compile')
@click.argument('doc', type=click.Path(dir_okay=False), required=False)
@click.option('--matrix', 'entries', type=float, nargs=8, default=None,
              help="Re, Im des quatre coefficients, ligne par ligne (u00 u01 u10 u11)")
@click.pass_context
def compile_command(ctx, doc, entries):
    """Angles (q1, q2, q3) d'une porte 2×2, lue dans un document `compile` ou via --matrix."""
    if (doc is None) == (entries is None):
        raise InputError("fournir soit un document `compile`, soit --matrix")
    service = SimulationService(ctx.obj['settings'])
    try:
        if doc is not None:
            report = service.run(_load(ctx, doc, (ExperimentKind.COMPILE,)))
        else:
            values = np.array(entries, dtype=float)
            report = service.compile_matrix((values[0::2] + 1j * values[1::2]).reshape(2, 2))
    except UnitarityError as e:
        raise InputError(f"matrice non unitaire : ||U†U - I||_max = {e.deviation:.3e}")
    except HybridQPError as e:
        raise InputError(str(e))
    filename = f"{Path(doc).stem}.report.json" if doc is not None else 'compile.report.json'
    _emit(ctx, dump_report(report), filename)


@main.command()
@click.pass_context
def config(ctx):
    """Affiche l'état de la configuration et les réglages effectifs."""
    loader = ctx.obj['loader']
    status = {'status': loader.get_config_status(), 'settings': ctx.obj['settings']}
    click.echo(json.dumps(status, sort_keys=True, indent=2, ensure_ascii=False))
