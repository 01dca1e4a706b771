from pipeline.enums import Stage
from pipeline.stage import StageCommand
from predictor.management.commands.train import TRAINING_FLAGS


class Command(StageCommand):
    help = "Per-layer predicted vs analytic energy for every model of a dataset."
    stage = Stage.PREDICT
    accepts_power_logs = True
    flags = TRAINING_FLAGS

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--checkpoint", help="Trained predictor JSON; trains one when omitted."
        )
        parser.add_argument(
            "--dataset", help="Dataset CSV; morphs and labels the models when omitted."
        )
