from django.apps import AppConfig


class SlicerConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "slicer"
    verbose_name = "Slicer and layered masks"
