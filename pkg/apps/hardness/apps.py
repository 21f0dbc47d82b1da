from django.apps import AppConfig


class HardnessConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.hardness'
    verbose_name = 'Query hardness'
