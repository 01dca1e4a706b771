from django.apps import AppConfig


class GraspSpaceConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "grasp_space"
    verbose_name = "Flexible grasping space"
