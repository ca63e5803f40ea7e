from django.apps import AppConfig


class LidsConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "lids"
    verbose_name = "LiDS graph engine"
