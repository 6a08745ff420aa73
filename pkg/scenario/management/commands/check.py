import logging

from django.core.management.base import CommandError
from django.core.management.commands.check import Command as SystemCheckCommand

from core.exceptions import InvalidParameters
from core.utils import EXIT_CHECK, EXIT_CONFIG, error_payload, render_json
from metrics.checks import (
    check_dynamic_signal,
    check_envelope_bound,
    check_log_barrier_bound,
    check_normalizer_bound,
)
from perf_rate.checks import check_perf_rate
from scenario.parsers import load_config
from scenario.serializers import validate_parsed
from sim.integrator import run_scenario

logger = logging.getLogger(__name__)

# Trajectoire courte utilisée pour contrôler le signal dynamique intégré
DYNAMIC_SIGNAL_SCENARIO = 'example2'
DYNAMIC_SIGNAL_HORIZON = 1.0


def dynamic_signal_report():
    parsed = load_config(DYNAMIC_SIGNAL_SCENARIO)
    parsed.set('sim.horizon', str(DYNAMIC_SIGNAL_HORIZON))
    scenario = validate_parsed(parsed).build()
    outcome = run_scenario(scenario)
    signal = scenario.plant.dyn_signal
    return check_dynamic_signal(outcome.records, signal.c_bar, signal.upsilon_bar, signal.d)


class Command(SystemCheckCommand):
    help = (
        "Contrôles système de Django ; avec --samples, vérifie par échantillonnage "
        "les inégalités de la synthèse et écrit un rapport JSON sur la sortie standard"
    )

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--samples', type=int, default=None, help='Nombre de tirages par inégalité')
        parser.add_argument('--seed', type=int, default=0, help='Graine du générateur')

    def handle(self, *app_labels, **options):
        if options['samples'] is None:
            return super().handle(*app_labels, **options)

        samples, seed = options['samples'], options['seed']
        if samples <= 0:
            message = f"--samples doit être strictement positif (reçu {samples})"
            self.stderr.write(render_json(error_payload(message, status_code=EXIT_CONFIG)).decode(), ending='')
            raise CommandError(message, returncode=EXIT_CONFIG)

        try:
            reports = [
                check_perf_rate(samples, seed=seed),
                check_normalizer_bound(samples, seed=seed),
                check_log_barrier_bound(samples, seed=seed),
                check_envelope_bound(samples, seed=seed),
                dynamic_signal_report(),
            ]
        except InvalidParameters as exc:
            raise CommandError(str(exc), returncode=EXIT_CONFIG)

        passed = all(report.passed for report in reports)
        report = {
            'samples': samples,
            'seed': seed,
            'passed': passed,
            'checks': [r.as_payload() for r in reports],
        }
        self.stdout.write(render_json(report).decode(), ending='')

        if not passed:
            first = next(r for r in reports if not r.passed)
            logger.error(f"{first.name} : premier contre-exemple {first.counterexample}")
            raise CommandError(
                f"{first.name} : {first.violations} violation(s), contre-exemple {first.counterexample}",
                returncode=EXIT_CHECK,
            )
