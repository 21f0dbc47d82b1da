import uuid

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="ExperimentRun",
            fields=[
                (
                    "id",
                    models.UUIDField(
                        default=uuid.uuid4,
                        editable=False,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "created_at",
                    models.DateTimeField(auto_now_add=True, verbose_name="Created at"),
                ),
                (
                    "updated_at",
                    models.DateTimeField(auto_now=True, verbose_name="Updated at"),
                ),
                ("config", models.JSONField(verbose_name="Configuration")),
                (
                    "out_dir",
                    models.CharField(max_length=500, verbose_name="Output directory"),
                ),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("PENDING", "Pending"),
                            ("RUNNING", "Running"),
                            ("COMPLETED", "Completed"),
                            ("FAILED", "Failed"),
                        ],
                        default="PENDING",
                        max_length=20,
                        verbose_name="Status",
                    ),
                ),
                (
                    "stage",
                    models.CharField(blank=True, max_length=50, verbose_name="Last stage"),
                ),
                ("error", models.TextField(blank=True, verbose_name="Error")),
                (
                    "correlations",
                    models.JSONField(blank=True, null=True, verbose_name="Correlation table"),
                ),
            ],
            options={
                "verbose_name": "Experiment run",
                "verbose_name_plural": "Experiment runs",
                "db_table": "experiment_runs",
                "ordering": ["-created_at"],
            },
        ),
    ]
