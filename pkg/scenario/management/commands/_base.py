"""
Socle commun des commandes de simulation
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import ConfigError
from core.utils import EXIT_CONFIG, error_payload, exit_code_for_exception, render_json
from scenario.parsers import load_config
from scenario.serializers import validate_parsed

logger = logging.getLogger(__name__)


class ScenarioCommand(BaseCommand):
    """Ajoute --config et la conversion des erreurs en codes de sortie"""

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            required=True,
            help="Chemin d'un fichier .cfg ou nom d'un scénario fourni (example1, example2)",
        )
        parser.add_argument('--out', help="Répertoire de sortie (remplace outputs.dir)")

    def load(self, options, **overrides):
        """ScenarioConfig validé ; les surcharges non nulles remplacent les valeurs du fichier"""
        try:
            parsed = load_config(options['config'])
            for key, value in overrides.items():
                if value is not None:
                    parsed.set(key, str(value))
            if options.get('out'):
                parsed.set('outputs.dir', options['out'])
            return validate_parsed(parsed)
        except ConfigError as exc:
            self.fail(exc, EXIT_CONFIG)

    def fail(self, exc, code=None):
        """Écrit le rapport d'erreur sur stderr puis sort avec le code associé"""
        code = exit_code_for_exception(exc) if code is None else code
        details = {'line': exc.line, 'field': exc.field} if isinstance(exc, ConfigError) else None
        self.stderr.write(render_json(error_payload(str(exc), details=details, status_code=code)).decode(), ending='')
        raise CommandError(str(exc), returncode=code)
