"""
Écriture des résultats : trajectory.csv, metrics.json, sweep_summary.json
"""
import logging
from pathlib import Path

import numpy as np

from core.utils import render_json
from scenario.serializers import RunMetricsSerializer, SweepEntrySerializer, SweepSummarySerializer

logger = logging.getLogger(__name__)

TRAJECTORY_FILE = 'trajectory.csv'
METRICS_FILE = 'metrics.json'
SWEEP_SUMMARY_FILE = 'sweep_summary.json'


def _indexed(prefix, count):
    return [f"{prefix}{k}" for k in range(1, count + 1)]


def trajectory_columns(n, n0):
    """En-tête CSV pour un procédé d'ordre n avec n0 états non modélisés"""
    return [
        't',
        *_indexed('x', n),
        *_indexed('xi', n0),
        'r',
        *_indexed('z', n),
        *_indexed('w', n - 1),
        'u',
        *_indexed('alpha', n - 1),
        *_indexed('alpha_c', n - 1),
        'sigma1',
        'sigma2',
        'rho',
        'e',
        *_indexed('theta_hat', n),
        *_indexed('gamma_hat', n - 1),
    ]


def trajectory_row(rec):
    return [
        rec.t, *rec.x, *rec.xi, rec.r, *rec.z, *rec.w, rec.u, *rec.alpha, *rec.alpha_c,
        rec.sigma1, rec.sigma2, rec.rho, rec.e, *rec.theta_hat, *rec.gamma_hat,
    ]


def trajectory_matrix(records, n, n0):
    columns = trajectory_columns(n, n0)
    if not records:
        return np.empty((0, len(columns)))
    return np.array([trajectory_row(rec) for rec in records], dtype=float)


def write_trajectory_csv(path, records, n, n0):
    """17 chiffres significatifs, séparateur virgule, fin de ligne \\n"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(
        path,
        trajectory_matrix(records, n, n0),
        fmt='%.16e',
        delimiter=',',
        newline='\n',
        header=','.join(trajectory_columns(n, n0)),
        comments='',
    )
    return path


def write_json(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(render_json(data))
    return path


def write_run(directory, scenario, outcome, csv=True, metrics=True):
    """Écrit les fichiers d'une exécution ; renvoie la liste des chemins écrits"""
    directory = Path(directory)
    written = []
    if csv:
        written.append(write_trajectory_csv(
            directory / TRAJECTORY_FILE, outcome.records, scenario.plant.n, scenario.plant.n0,
        ))
    if metrics:
        payload = RunMetricsSerializer(RunMetricsSerializer.payload(outcome, scenario)).data
        written.append(write_json(directory / METRICS_FILE, payload))
    logger.info(f"{scenario.label or scenario.plant.name} : {len(written)} fichier(s) écrit(s) dans {directory}")
    return written


def write_sweep_summary(directory, param, entries):
    """entries : liste de (valeur, RunOutcome, répertoire de l'exécution)"""
    runs = [SweepEntrySerializer.payload(value, outcome, run_dir) for value, outcome, run_dir in entries]
    data = SweepSummarySerializer({
        'param': str(param),
        'values': [value for value, _, _ in entries],
        'runs': runs,
    }).data
    return write_json(Path(directory) / SWEEP_SUMMARY_FILE, data)
