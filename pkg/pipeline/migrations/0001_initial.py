# Generated by Django 5.2.7 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="RunRecord",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "stage",
                    models.CharField(
                        choices=[
                            ("measure", "Measure mesh"),
                            ("fgs", "Flexible grasping space"),
                            ("morph", "Grasp morphing"),
                            ("slice", "Slice and masks"),
                            ("energy", "Analytic energy"),
                            ("train", "Train predictor"),
                            ("predict", "Predict layer energy"),
                            ("optimize", "NSGA-II search"),
                            ("pipeline", "Full pipeline"),
                            ("export_hand", "Export synthetic hand"),
                        ],
                        max_length=20,
                    ),
                ),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("running", "Running"),
                            ("succeeded", "Succeeded"),
                            ("failed", "Failed"),
                        ],
                        default="running",
                        max_length=20,
                    ),
                ),
                ("config_hash", models.CharField(db_index=True, max_length=64)),
                ("seed", models.IntegerField()),
                ("output_dir", models.CharField(max_length=500)),
                ("manifest", models.JSONField(blank=True, default=dict)),
                ("error", models.TextField(blank=True)),
                ("started_at", models.DateTimeField(auto_now_add=True)),
                ("finished_at", models.DateTimeField(blank=True, null=True)),
            ],
            options={
                "ordering": ["-started_at"],
                "indexes": [
                    models.Index(
                        fields=["stage", "status"], name="pipeline_run_stage_idx"
                    )
                ],
            },
        ),
    ]
