from .base import *

DEBUG = True

# Logging configuration for development
LOGGING['handlers']['console']['formatter'] = 'verbose'
for app in LOCAL_APPS:
    LOGGING['loggers'][app]['level'] = config('SIM_LOG_LEVEL', default='DEBUG')
