from django.db import models

from .enums import RunStatus, Stage


class RunRecord(models.Model):
    """One CLI stage run and the manifest it wrote."""

    stage = models.CharField(max_length=20, choices=Stage.choices)
    status = models.CharField(
        max_length=20, choices=RunStatus.choices, default=RunStatus.RUNNING
    )
    config_hash = models.CharField(max_length=64, db_index=True)
    seed = models.IntegerField()
    output_dir = models.CharField(max_length=500)
    manifest = models.JSONField(default=dict, blank=True)
    error = models.TextField(blank=True)
    started_at = models.DateTimeField(auto_now_add=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        indexes = [
            models.Index(fields=["stage", "status"], name="pipeline_run_stage_idx"),
        ]
        ordering = ["-started_at"]

    def __str__(self):
        return f"{self.stage} [{self.status}] {self.config_hash[:12]}"
