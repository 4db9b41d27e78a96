from django.apps import AppConfig


class IfsCoreConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'ifs_core'
    verbose_name = 'Box-like IFS core'
