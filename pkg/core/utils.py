from rest_framework.renderers import JSONRenderer
import logging

from core.exceptions import (
    ConfigError,
    FunnelViolation,
    InvalidParameters,
    NumericalBlowup,
    CheckFailure,
)

logger = logging.getLogger(__name__)

# Codes de sortie des commandes (contrat utilisé par la CI)
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FUNNEL = 2
EXIT_BLOWUP = 3
EXIT_CHECK = 4

STATUS_EXIT_CODES = {
    'Completed': EXIT_OK,
    'FunnelViolation': EXIT_FUNNEL,
    'InitialFunnelViolation': EXIT_FUNNEL,
    'NumericalBlowup': EXIT_BLOWUP,
    'InvalidParameters': EXIT_CONFIG,
}


def exit_code_for_status(status):
    """
    Code de sortie associé au statut d'une exécution
    """
    return STATUS_EXIT_CODES.get(str(status), EXIT_CONFIG)


def exit_code_for_exception(exc):
    """
    Code de sortie associé à une exception remontée par une commande
    """
    if isinstance(exc, CheckFailure):
        return EXIT_CHECK
    if isinstance(exc, FunnelViolation):
        return EXIT_FUNNEL
    if isinstance(exc, NumericalBlowup):
        return EXIT_BLOWUP
    if isinstance(exc, (ConfigError, InvalidParameters, OSError)):
        return EXIT_CONFIG
    logger.error(f'Unexpected error: {exc}', exc_info=True)
    return EXIT_CONFIG


def error_payload(message="Une erreur est survenue", details=None, status_code=EXIT_CONFIG):
    """
    Fonction utilitaire pour créer des rapports d'erreur cohérents
    """
    return {
        'error': True,
        'message': message,
        'details': details,
        'status_code': status_code,
    }


def render_json(data):
    """
    Rendu JSON strict (aucune valeur non finie) indenté, terminé par un saut de ligne
    """
    return JSONRenderer().render(data, renderer_context={'indent': 2}) + b'\n'
