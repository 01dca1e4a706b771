from energy.management.commands.energy import PROCESS_FLAGS
from pipeline.enums import Stage
from pipeline.stage import StageCommand
from predictor.enums import LabelTarget

TRAINING_FLAGS = (
    ("--epochs", ("training", "epochs"), {"type": int}),
    ("--hidden", ("training", "hidden"), {"type": int}),
    ("--blocks", ("training", "blocks"), {"type": int}),
    ("--learning-rate", ("training", "learning_rate"), {"type": float}),
    ("--batch-size", ("training", "batch_size"), {"type": int}),
    ("--pseudo-weight", ("training", "pseudo_weight"), {"type": float}),
    ("--resolution", ("slicer", "resolution"), {"type": int}),
)


class Command(StageCommand):
    help = "Build the multi-pose layer dataset and train the energy predictor."
    stage = Stage.TRAIN
    accepts_power_logs = True
    flags = (
        TRAINING_FLAGS
        + PROCESS_FLAGS
        + (
            (
                "--label-target",
                ("training", "label_target"),
                {"choices": LabelTarget.values},
            ),
            (
                "--compare",
                ("training", "compare"),
                {
                    "action": "store_const",
                    "const": True,
                    "help": "Also train single-pose networks and compare.",
                },
            ),
        )
    )
