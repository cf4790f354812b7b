# Run Registry Models - Depth Fusion Application
# Modelos do Registro de Execuções - Aplicação Depth Fusion

# This module defines the run registry:
# - ExperimentRun: one harness command invocation with its resolved config
# - MetricsRecord: one metrics report (variant and noise cell) of a run
#
# Este módulo define o registro de execuções:
# - ExperimentRun: uma invocação de comando com sua configuração resolvida
# - MetricsRecord: um relatório de métricas (variante e célula de ruído)

from __future__ import annotations

from typing import Any

from django.core.exceptions import ValidationError
from django.db import models
from django.utils.translation import gettext_lazy as _

from depthfusion.mixins import FinishableModelMixin, TimeStampedModelMixin
from depthfusion.validators import RangeValidator, validate_seed


class ExperimentRun(TimeStampedModelMixin, FinishableModelMixin):
    """
    One invocation of a harness command.
    Uma invocação de um comando do harness.

    Fields:
        command: Harness command name (synth, train, eval, ...)
        status: running, completed or failed
        seed: Master seed of the run
        config: Fully resolved RunConfig as JSON
        output_dir: Directory the run wrote to
        error_category / error_message: Set when the run failed
    """

    class Status(models.TextChoices):
        RUNNING = "running", _("Running")
        COMPLETED = "completed", _("Completed")
        FAILED = "failed", _("Failed")

    command = models.CharField(
        max_length=32,
        db_index=True,
        verbose_name=_("Command"),
        help_text=_("Harness command / Comando do harness"),
    )

    status = models.CharField(
        max_length=16,
        choices=Status.choices,
        default=Status.RUNNING,
        db_index=True,
        verbose_name=_("Status"),
    )

    seed = models.BigIntegerField(
        default=0,
        validators=[validate_seed],
        verbose_name=_("Seed"),
        help_text=_("Master seed of the run / Semente mestre da execução"),
    )

    config = models.JSONField(
        default=dict,
        blank=True,
        verbose_name=_("Configuration"),
        help_text=_("Resolved run configuration / Configuração resolvida"),
    )

    output_dir = models.CharField(
        max_length=500,
        blank=True,
        verbose_name=_("Output Directory"),
    )

    error_category = models.CharField(max_length=32, blank=True, verbose_name=_("Error Category"))

    error_message = models.TextField(blank=True, verbose_name=_("Error Message"))

    class Meta:
        ordering = ["-created_at"]
        verbose_name = _("Experiment Run")
        verbose_name_plural = _("Experiment Runs")
        indexes = [
            models.Index(fields=["command", "-created_at"], name="run_command_created_idx"),
        ]

    def __str__(self) -> str:
        return f"{self.command} #{self.pk} ({self.status})"

    def __repr__(self) -> str:
        return (
            f"<ExperimentRun id={self.pk} command='{self.command}' "
            f"status={self.status} seed={self.seed}>"
        )

    # State transitions / Transições de estado

    def complete(self) -> None:
        self.status = self.Status.COMPLETED
        self.mark_finished()
        self.save(update_fields=["status", "finished_at", "updated_at"])

    def fail(self, category: str, message: str) -> None:
        self.status = self.Status.FAILED
        self.error_category = category[:32]
        self.error_message = message
        self.mark_finished()
        self.save(
            update_fields=[
                "status",
                "error_category",
                "error_message",
                "finished_at",
                "updated_at",
            ]
        )

    @property
    def is_finished(self) -> bool:
        return self.status != self.Status.RUNNING


class MetricsRecord(TimeStampedModelMixin):
    """
    One MetricsReport stored against its run.
    Um MetricsReport armazenado junto à sua execução.

    ``label`` names the variant (fusion mode, backbone kind or "model");
    the sigma fields identify the pose-noise cell.
    """

    run = models.ForeignKey(
        ExperimentRun,
        on_delete=models.CASCADE,
        related_name="metrics",
        verbose_name=_("Run"),
    )

    label = models.CharField(max_length=64, default="model", verbose_name=_("Label"))
    seed = models.BigIntegerField(default=0, validators=[validate_seed], verbose_name=_("Seed"))

    sigma_rot = models.FloatField(
        default=0.0,
        validators=[RangeValidator(min_value=0.0)],
        verbose_name=_("Rotation Noise (deg)"),
    )
    sigma_trans = models.FloatField(
        default=0.0,
        validators=[RangeValidator(min_value=0.0)],
        verbose_name=_("Translation Noise (fraction of baseline)"),
    )

    abs_rel = models.FloatField(validators=[RangeValidator(min_value=0.0)])
    sq_rel = models.FloatField(validators=[RangeValidator(min_value=0.0)])
    rmse = models.FloatField(validators=[RangeValidator(min_value=0.0)])
    delta1 = models.FloatField(validators=[RangeValidator(min_value=0.0, max_value=1.0)])
    delta2 = models.FloatField(validators=[RangeValidator(min_value=0.0, max_value=1.0)])
    delta3 = models.FloatField(validators=[RangeValidator(min_value=0.0, max_value=1.0)])
    n_pixels = models.PositiveIntegerField(verbose_name=_("Evaluated Pixels"))

    class Meta:
        ordering = ["run", "label", "sigma_rot", "sigma_trans", "seed"]
        verbose_name = _("Metrics Record")
        verbose_name_plural = _("Metrics Records")

    def clean(self) -> None:
        super().clean()
        if not self.delta1 <= self.delta2 <= self.delta3:
            raise ValidationError(
                {
                    "delta2": "Delta accuracies must be nested. / "
                    "As acurácias delta devem ser aninhadas."
                }
            )

    def __str__(self) -> str:
        return (
            f"{self.label} rot={self.sigma_rot} trans={self.sigma_trans}: "
            f"AbsRel {self.abs_rel:.4f}"
        )

    def __repr__(self) -> str:
        return (
            f"<MetricsRecord id={self.pk} "
            f"run={self.run_id} "  # type: ignore[attr-defined]
            f"label='{self.label}' "
            f"abs_rel={self.abs_rel}>"
        )

    @classmethod
    def from_report(cls, run: ExperimentRun, report: Any, **fields: Any) -> MetricsRecord:
        """
        Unsaved record built from a MetricsReport.
        Registro (não salvo) construído a partir de um MetricsReport.
        """
        return cls(
            run=run,
            abs_rel=report.abs_rel,
            sq_rel=report.sq_rel,
            rmse=report.rmse,
            delta1=report.delta1,
            delta2=report.delta2,
            delta3=report.delta3,
            n_pixels=report.n_pixels,
            **fields,
        )
