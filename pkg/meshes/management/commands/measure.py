from pipeline.enums import Stage
from pipeline.stage import StageCommand


class Command(StageCommand):
    help = "Measure a mesh: surface area, volume, centroid, AABB, print-space fit."
    stage = Stage.MEASURE
    flags = (
        (
            "--print-space",
            ("printer", "print_space"),
            {"type": float, "nargs": 3, "help": "Printer x_p y_p z_p (mm)."},
        ),
    )
