from django.apps import AppConfig


class SteinerConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.steiner'
    verbose_name = 'Steiner trees and minimum effort'
