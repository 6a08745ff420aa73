from django.core.management.base import CommandError

from core.exceptions import InvalidParameters
from core.utils import exit_code_for_status
from scenario.exporters import write_run
from scenario.management.commands._base import ScenarioCommand
from sim.integrator import run_scenario


class Command(ScenarioCommand):
    help = 'Simule un scénario et écrit trajectory.csv et metrics.json'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--sigma-bar', type=float, help='Remplace gains.sigma_bar')
        parser.add_argument('--dt', type=float, help='Remplace sim.dt')
        parser.add_argument('--horizon', type=float, help='Remplace sim.horizon')

    def handle(self, *args, **options):
        config = self.load(
            options,
            **{'gains.sigma_bar': options['sigma_bar'], 'sim.dt': options['dt'], 'sim.horizon': options['horizon']},
        )
        scenario = config.build()
        try:
            outcome = run_scenario(scenario)
        except InvalidParameters as exc:
            self.fail(exc)

        outputs = config.outputs
        write_run(outputs.path, scenario, outcome, csv=outputs.csv, metrics=outputs.metrics)

        code = exit_code_for_status(outcome.status)
        if code:
            raise CommandError(f"{outcome.status} : {outcome.message}", returncode=code)
        self.stdout.write(
            self.style.SUCCESS(
                f"{config.plant} terminé : énergie {outcome.metrics.energy:.6g}, |e(T)| {outcome.metrics.e_at_T:.3g}"
            )
        )
