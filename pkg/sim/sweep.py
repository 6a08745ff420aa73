"""
Balayage d'un paramètre sur un pool de processus, résultats dans l'ordre d'entrée
"""
import logging

from billiard import Pool
from django.conf import settings

from core.exceptions import InvalidParameters
from sim.integrator import run_scenario
from sim.models import RunOutcome, RunStatus, SweepParam

logger = logging.getLogger(__name__)


def _run_one(job):
    """Exécution isolée : une valeur invalide n'interrompt pas le balayage"""
    scenario, param, value = job
    try:
        return run_scenario(scenario.with_param(param, value))
    except InvalidParameters as exc:
        logger.warning(f"{param}={value:g} : {exc}")
        return RunOutcome(RunStatus.INVALID_PARAMETERS, message=str(exc))


def resolve_jobs(jobs=None):
    """Nombre de processus : --jobs, sinon DSC_PTC_JOBS"""
    if jobs is None:
        jobs = getattr(settings, 'DSC_PTC_JOBS', 1)
    jobs = int(jobs)
    if jobs < 1:
        raise InvalidParameters(f"jobs doit être ≥ 1 (reçu {jobs})")
    return jobs


def sweep(scenario, param, values, jobs=None):
    """
    Exécute le scénario pour chaque valeur du paramètre

    Renvoie une liste de couples (valeur, RunOutcome) dans l'ordre de `values`.
    """
    if param not in SweepParam.values:
        choices = ', '.join(SweepParam.values)
        raise InvalidParameters(f"Paramètre de balayage inconnu : {param} (choix : {choices})")
    values = [float(v) for v in values]
    if not values:
        return []
    jobs = min(resolve_jobs(jobs), len(values))
    work = [(scenario, param, v) for v in values]
    logger.info(f"Balayage de {param} sur {len(values)} valeur(s), {jobs} processus")

    if jobs == 1:
        outcomes = [_run_one(job) for job in work]
    else:
        pool = Pool(processes=jobs)
        try:
            outcomes = pool.map(_run_one, work)
        finally:
            pool.close()
            pool.join()
    return list(zip(values, outcomes))
