from django.apps import AppConfig


class WorkloadConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.workload'
    verbose_name = 'Workload generation'
