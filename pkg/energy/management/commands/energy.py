from pipeline.enums import Stage
from pipeline.stage import StageCommand

PROCESS_FLAGS = (
    ("--nozzle-temperature", ("process", "nozzle_temperature"), {"type": float}),
    ("--temperature-gradient", ("process", "temperature_gradient"), {"type": float}),
    ("--velocity", ("process", "velocity"), {"type": float}),
    ("--thickness", ("slicer", "thickness"), {"type": float}),
)


class Command(StageCommand):
    help = "Analytic (and measured, given power logs) energy of each model."
    stage = Stage.ENERGY
    accepts_power_logs = True
    flags = PROCESS_FLAGS + (
        ("--infill-rate", ("printer", "infill_rate"), {"type": float}),
        ("--working-power", ("printer", "working_power"), {"type": float}),
    )
