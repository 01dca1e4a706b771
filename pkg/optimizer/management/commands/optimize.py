from pipeline.enums import Stage
from pipeline.stage import StageCommand


class Command(StageCommand):
    help = "NSGA-II search over grasp angles and process settings."
    stage = Stage.OPTIMIZE
    flags = (
        ("--population", ("ga", "population"), {"type": int}),
        ("--generations", ("ga", "generations"), {"type": int}),
        ("--workers", ("ga", "workers"), {"type": int}),
        ("--resolution", ("slicer", "resolution"), {"type": int}),
    )

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--checkpoint",
            help="Trained predictor JSON for E_total; the analytic model otherwise.",
        )
