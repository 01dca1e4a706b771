from django.db import models


class Objective(models.TextChoices):
    ENERGY = "E_total", "Total print energy (kJ)"
    MORPH = "E_morph", "Morphing energy E(V')"
    GEOMETRIC = "epsilon_geometric", "Geometric error (mm)"


class ProcessVariable(models.TextChoices):
    NOZZLE_TEMPERATURE = "nozzle_temperature", "T_n (K)"
    TEMPERATURE_GRADIENT = "temperature_gradient", "grad T (K/mm)"
    PRINT_VELOCITY = "print_velocity", "V_F (mm/s)"
    LAYER_THICKNESS = "layer_thickness", "d (mm)"
