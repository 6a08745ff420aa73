from django.apps import AppConfig


class PerfRateConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'perf_rate'
