from .base import *

DEBUG = False

# Un seul processus : les tests restent déterministes et rapides à démarrer
DSC_PTC_JOBS = 1

SIM_OUTPUT_DIR = BASE_DIR / 'out' / 'tests'

# Les avertissements restent visibles, le bruit INFO est coupé
for app in LOCAL_APPS:
    LOGGING['loggers'][app]['level'] = 'WARNING'
