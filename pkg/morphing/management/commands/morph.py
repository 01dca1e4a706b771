from morphing.enums import WeightMode
from pipeline.enums import Stage
from pipeline.stage import StageCommand


class Command(StageCommand):
    help = "Morph the mesh into each schedule's final grasp and export OBJ files."
    stage = Stage.MORPH
    flags = (
        (
            "--weight-mode",
            ("morph", "weight_mode"),
            {"choices": WeightMode.values},
        ),
        (
            "--constraints",
            ("constraints",),
            {"help": "JSON map {vertex: [x, y, z]} morphed as an extra model."},
        ),
    )
