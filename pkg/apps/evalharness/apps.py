from django.apps import AppConfig


class EvalharnessConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.evalharness'
    verbose_name = 'Evaluation harness'
