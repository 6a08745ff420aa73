from django.core.management.base import CommandError

from core.exceptions import InvalidParameters
from core.utils import EXIT_CONFIG, exit_code_for_status
from scenario.exporters import write_run, write_sweep_summary
from scenario.management.commands._base import ScenarioCommand
from scenario.parsers import split_vector
from sim.models import RunStatus, SweepParam
from sim.sweep import sweep


class Command(ScenarioCommand):
    help = "Balaye un paramètre du scénario ; un sous-répertoire par valeur et sweep_summary.json"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--param', required=True, choices=SweepParam.values)
        parser.add_argument('--values', required=True, help='Valeurs séparées par des virgules, ex. 20,30,50,100')
        parser.add_argument('--jobs', type=int, help='Taille du pool (défaut : DSC_PTC_JOBS)')

    def handle(self, *args, **options):
        config = self.load(options)
        try:
            values = [float(v) for v in split_vector(options['values'])]
        except ValueError as exc:
            self.fail(InvalidParameters(f"--values : {exc}"), EXIT_CONFIG)
        if not values:
            self.fail(InvalidParameters("--values ne contient aucune valeur"), EXIT_CONFIG)

        scenario = config.build()
        param = options['param']
        try:
            results = sweep(scenario, param, values, jobs=options['jobs'])
        except InvalidParameters as exc:
            self.fail(exc, EXIT_CONFIG)

        outputs = config.outputs
        entries = []
        for value, outcome in results:
            run_dir = outputs.path / f"{param}={value:g}"
            if outcome.status != RunStatus.INVALID_PARAMETERS:
                write_run(run_dir, scenario.with_param(param, value), outcome, csv=outputs.csv, metrics=outputs.metrics)
            entries.append((value, outcome, run_dir))
        write_sweep_summary(outputs.path, param, entries)

        code = max(exit_code_for_status(outcome.status) for _, outcome in results)
        failed = [f"{param}={value:g} ({outcome.status})" for value, outcome in results if not outcome.completed]
        if code:
            raise CommandError(f"Exécution(s) en échec : {', '.join(failed)}", returncode=code)
        self.stdout.write(self.style.SUCCESS(f"{len(results)} exécution(s) terminée(s) dans {outputs.path}"))
