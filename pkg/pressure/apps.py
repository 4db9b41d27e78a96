from django.apps import AppConfig


class PressureConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'pressure'
