from django.db import models


class ContactModel(models.TextChoices):
    SOFT_FINGER = "soft-finger", "Soft finger (3 forces + normal moment)"


class GraspPose(models.TextChoices):
    """Named schedules shipped with the synthetic hand."""

    CLAWS = "claws", "Claws"
    CAPISCE = "capisce", "Capisce"
