import os
from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

# Aucun service HTTP n'est exposé, la clé ne sert qu'au démarrage de Django
SECRET_KEY = config('SECRET_KEY', default='django-insecure-change-me')

DEBUG = config('DEBUG', default=False, cast=bool)
ALLOWED_HOSTS = []

# Application definition
THIRD_PARTY_APPS = [
    'rest_framework',
]

LOCAL_APPS = [
    'perf_rate',
    'plant',
    'controller',
    'sim',
    'metrics',
    'scenario',
]

INSTALLED_APPS = THIRD_PARTY_APPS + LOCAL_APPS

# Pas de base de données : les résultats sont écrits en CSV/JSON
DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'fr-fr'
TIME_ZONE = 'Africa/Douala'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Django REST Framework (sérialisation et rendu JSON uniquement)
REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'STRICT_JSON': True,
    'COERCE_DECIMAL_TO_STRING': False,
}

# Simulation
SIMULATION_DEFAULTS = {
    'dt': config('SIM_DEFAULT_DT', default=1e-4, cast=float),
    'horizon': config('SIM_DEFAULT_HORIZON', default=10.0, cast=float),
    'log_stride': config('SIM_DEFAULT_LOG_STRIDE', default=10, cast=int),
    'guard_delta': 1e-9,
    'blowup_limit': 1e9,
}

SIM_OUTPUT_DIR = config('SIM_OUTPUT_DIR', default='out')

# Taille du pool de processus pour les balayages (repli de --jobs)
DSC_PTC_JOBS = config('DSC_PTC_JOBS', default=os.cpu_count() or 1, cast=int)

# Scénarios fournis avec le dépôt
SCENARIO_CONFIG_DIR = BASE_DIR / 'scenario' / 'configs'

SIM_LOG_LEVEL = config('SIM_LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'root': {
        'level': 'WARNING',
        'handlers': ['console'],
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': SIM_LOG_LEVEL,
            'propagate': False,
        }
        for app in LOCAL_APPS
    },
}
