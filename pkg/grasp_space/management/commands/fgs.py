from pipeline.enums import Stage
from pipeline.stage import StageCommand


class Command(StageCommand):
    help = "Cover the mesh (and the hand's swept reach) with oblique ellipsoids."
    stage = Stage.FGS
    flags = (
        ("--max-ellipsoids", ("grasp_space", "max_ellipsoids"), {"type": int}),
        ("--envelope-eps", ("grasp_space", "envelope_eps"), {"type": float}),
        (
            "--samples",
            ("grasp_space", "samples"),
            {"type": int, "help": "Monte-Carlo samples for union volume and area."},
        ),
    )
