from django.apps import AppConfig


class MorphingConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "morphing"
    verbose_name = "Laplacian morphing"
