# Generated by Django 5.2.7 on 2026-10-18 09:00

import django.db.models.deletion
from django.db import migrations, models

import depthfusion.validators


class Migration(migrations.Migration):
    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="ExperimentRun",
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
                    "created_at",
                    models.DateTimeField(
                        auto_now_add=True,
                        help_text="Timestamp when the record was created",
                        verbose_name="Created At",
                    ),
                ),
                (
                    "updated_at",
                    models.DateTimeField(
                        auto_now=True,
                        help_text="Timestamp when the record was last updated",
                        verbose_name="Updated At",
                    ),
                ),
                (
                    "finished_at",
                    models.DateTimeField(
                        blank=True,
                        help_text="When the work finished / Quando o trabalho terminou",
                        null=True,
                        verbose_name="Finished At",
                    ),
                ),
                (
                    "command",
                    models.CharField(
                        db_index=True,
                        help_text="Harness command / Comando do harness",
                        max_length=32,
                        verbose_name="Command",
                    ),
                ),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("running", "Running"),
                            ("completed", "Completed"),
                            ("failed", "Failed"),
                        ],
                        db_index=True,
                        default="running",
                        max_length=16,
                        verbose_name="Status",
                    ),
                ),
                (
                    "seed",
                    models.BigIntegerField(
                        default=0,
                        help_text="Master seed of the run / Semente mestre da execução",
                        validators=[depthfusion.validators.validate_seed],
                        verbose_name="Seed",
                    ),
                ),
                (
                    "config",
                    models.JSONField(
                        blank=True,
                        default=dict,
                        help_text="Resolved run configuration / Configuração resolvida",
                        verbose_name="Configuration",
                    ),
                ),
                (
                    "output_dir",
                    models.CharField(
                        blank=True, max_length=500, verbose_name="Output Directory"
                    ),
                ),
                (
                    "error_category",
                    models.CharField(
                        blank=True, max_length=32, verbose_name="Error Category"
                    ),
                ),
                (
                    "error_message",
                    models.TextField(blank=True, verbose_name="Error Message"),
                ),
            ],
            options={
                "verbose_name": "Experiment Run",
                "verbose_name_plural": "Experiment Runs",
                "ordering": ["-created_at"],
                "indexes": [
                    models.Index(
                        fields=["command", "-created_at"],
                        name="run_command_created_idx",
                    )
                ],
            },
        ),
        migrations.CreateModel(
            name="MetricsRecord",
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
                    "created_at",
                    models.DateTimeField(
                        auto_now_add=True,
                        help_text="Timestamp when the record was created",
                        verbose_name="Created At",
                    ),
                ),
                (
                    "updated_at",
                    models.DateTimeField(
                        auto_now=True,
                        help_text="Timestamp when the record was last updated",
                        verbose_name="Updated At",
                    ),
                ),
                (
                    "label",
                    models.CharField(default="model", max_length=64, verbose_name="Label"),
                ),
                (
                    "seed",
                    models.BigIntegerField(
                        default=0,
                        validators=[depthfusion.validators.validate_seed],
                        verbose_name="Seed",
                    ),
                ),
                (
                    "sigma_rot",
                    models.FloatField(
                        default=0.0,
                        validators=[depthfusion.validators.RangeValidator(min_value=0.0)],
                        verbose_name="Rotation Noise (deg)",
                    ),
                ),
                (
                    "sigma_trans",
                    models.FloatField(
                        default=0.0,
                        validators=[depthfusion.validators.RangeValidator(min_value=0.0)],
                        verbose_name="Translation Noise (fraction of baseline)",
                    ),
                ),
                (
                    "abs_rel",
                    models.FloatField(
                        validators=[depthfusion.validators.RangeValidator(min_value=0.0)]
                    ),
                ),
                (
                    "sq_rel",
                    models.FloatField(
                        validators=[depthfusion.validators.RangeValidator(min_value=0.0)]
                    ),
                ),
                (
                    "rmse",
                    models.FloatField(
                        validators=[depthfusion.validators.RangeValidator(min_value=0.0)]
                    ),
                ),
                (
                    "delta1",
                    models.FloatField(
                        validators=[
                            depthfusion.validators.RangeValidator(
                                max_value=1.0, min_value=0.0
                            )
                        ]
                    ),
                ),
                (
                    "delta2",
                    models.FloatField(
                        validators=[
                            depthfusion.validators.RangeValidator(
                                max_value=1.0, min_value=0.0
                            )
                        ]
                    ),
                ),
                (
                    "delta3",
                    models.FloatField(
                        validators=[
                            depthfusion.validators.RangeValidator(
                                max_value=1.0, min_value=0.0
                            )
                        ]
                    ),
                ),
                (
                    "n_pixels",
                    models.PositiveIntegerField(verbose_name="Evaluated Pixels"),
                ),
                (
                    "run",
                    models.ForeignKey(
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="metrics",
                        to="depthfusion.experimentrun",
                        verbose_name="Run",
                    ),
                ),
            ],
            options={
                "verbose_name": "Metrics Record",
                "verbose_name_plural": "Metrics Records",
                "ordering": ["run", "label", "sigma_rot", "sigma_trans", "seed"],
            },
        ),
    ]
