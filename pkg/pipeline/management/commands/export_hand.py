from pipeline.enums import Stage
from pipeline.stage import StageCommand


class Command(StageCommand):
    help = "Write the hand mesh, DH tables, grasp schedules and a run config."
    stage = Stage.EXPORT_HAND
