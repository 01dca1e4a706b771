from django.db import models


class InfillPattern(models.TextChoices):
    LINE = "line", "Line"
    GRID = "grid", "Grid"
    TRIANGLE = "triangle", "Triangle"
    TRI_HEXAGON = "tri-hexagon", "Tri-hexagon"

    @property
    def families(self):
        """(angle in degrees, phase in spacings) per hatch family."""
        return {
            InfillPattern.LINE: ((0.0, 0.0),),
            InfillPattern.GRID: ((0.0, 0.0), (90.0, 0.0)),
            InfillPattern.TRIANGLE: ((0.0, 0.0), (60.0, 0.0), (120.0, 0.0)),
            InfillPattern.TRI_HEXAGON: ((0.0, 0.0), (60.0, 0.5), (120.0, 0.0)),
        }[self]
