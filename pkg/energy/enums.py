from django.db import models


class ThermalModel(models.TextChoices):
    LINEAR = "linear", "Linear surrogate (coeff * grad T * d)"


class IsolatedError(models.TextChoices):
    FLATNESS = "flat", "Flatness"
    ROUNDNESS = "round", "Roundness"
    CYLINDRICITY = "cylindricity", "Cylindricity"
    LINE = "line", "Line profile"
    PLANAR = "planar", "Surface profile"


class AssociatedError(models.TextChoices):
    PARALLELISM = "para", "Parallelism"
    PERPENDICULARITY = "perpen", "Perpendicularity"
    INCLINATION = "inc", "Inclination"
    COAXIALITY = "coa", "Coaxiality"
    SYMMETRY = "sym", "Symmetry"
    LOCATION = "loc", "Location"
    CIRCULAR_RUNOUT = "cir", "Circular runout"
    TOTAL_RUNOUT = "total", "Total runout"
