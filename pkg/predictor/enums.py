from django.db import models


class LabelTarget(models.TextChoices):
    """Which analytic energy a pseudo-label apportions over the layers."""

    MELTING = "melting", "Melting energy"
    TOTAL = "total", "Melting plus working-power energy"


class LabelSource(models.TextChoices):
    MEASURED = "measured", "Aligned power log"
    PSEUDO = "pseudo", "Analytic pseudo-label"
