from django.db import models


class WeightMode(models.TextChoices):
    UNIFORM = "uniform", "Uniform (1 / card(N_i))"
    GAUSS_UNIFORM = "gauss-uniform", "Gaussian edge length, row normalised"
