from .enums import RunStatus
from .models import RunRecord


def recent_runs(stage=None, limit=20):
    """Latest run records, optionally for one stage."""
    runs = RunRecord.objects.all()
    if stage:
        runs = runs.filter(stage=stage)
    return runs[:limit]


def runs_for_config(config_hash):
    return RunRecord.objects.filter(config_hash=config_hash)


def latest_successful(stage):
    return (
        RunRecord.objects.filter(stage=stage, status=RunStatus.SUCCEEDED)
        .order_by("-started_at")
        .first()
    )
