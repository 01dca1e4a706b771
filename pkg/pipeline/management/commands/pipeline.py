from optimizer.management.commands.optimize import Command as OptimizeCommand
from pipeline.enums import Stage
from pipeline.stage import StageCommand
from predictor.management.commands.train import TRAINING_FLAGS


class Command(StageCommand):
    help = "Run every stage, measure through optimize, into one output tree."
    stage = Stage.PIPELINE
    accepts_power_logs = True
    source_key = None
    source_help = "Run config JSON (same as --config)."
    flags = (
        ("--mesh", ("mesh",), {"help": "Mesh file or builtin:<name>."}),
        ("--thickness", ("slicer", "thickness"), {"type": float}),
    ) + TRAINING_FLAGS + OptimizeCommand.flags[:3]
