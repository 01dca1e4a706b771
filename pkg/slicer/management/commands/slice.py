from pipeline.enums import Stage
from pipeline.stage import StageCommand
from slicer.enums import InfillPattern


class Command(StageCommand):
    help = "Slice a mesh into layers, masks, infill toolpaths and support stats."
    stage = Stage.SLICE
    flags = (
        ("--thickness", ("slicer", "thickness"), {"type": float}),
        ("--resolution", ("slicer", "resolution"), {"type": int}),
        ("--pattern", ("slicer", "pattern"), {"choices": InfillPattern.values}),
        ("--spacing", ("slicer", "spacing"), {"type": float}),
        (
            "--overhang-threshold",
            ("slicer", "overhang_threshold"),
            {"type": float, "help": "Radians from straight down."},
        ),
        (
            "--support-density",
            ("slicer", "support_density"),
            {"type": float, "help": "Samples per mm^2 of overhang; 0 uses centroids."},
        ),
    )
