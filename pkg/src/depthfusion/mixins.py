# Model Mixins - Depth Fusion Application
# Mixins de Modelo - Aplicação Depth Fusion

"""
Reusable abstract models for the run registry.

Modelos abstratos reutilizáveis para o registro de execuções.
"""

from django.db import models
from django.utils import timezone
from django.utils.translation import gettext_lazy as _


class TimeStampedModelMixin(models.Model):
    """
    Abstract base class with creation and modification timestamps.
    Classe base abstrata com timestamps de criação e modificação.

    Provides:
        - created_at: Auto-set on creation
        - updated_at: Auto-updated on save
    """

    created_at = models.DateTimeField(
        auto_now_add=True,
        verbose_name=_("Created At"),
        help_text=_("Timestamp when the record was created"),
    )

    updated_at = models.DateTimeField(
        auto_now=True,
        verbose_name=_("Updated At"),
        help_text=_("Timestamp when the record was last updated"),
    )

    class Meta:
        abstract = True
        ordering = ["-created_at"]


class FinishableModelMixin(models.Model):
    """
    Abstract base class for records of work that starts and then finishes.
    Classe base abstrata para registros de trabalho que começa e termina.

    Provides:
        - finished_at: Set by mark_finished()
        - duration_seconds: Elapsed time once finished
    """

    finished_at = models.DateTimeField(
        null=True,
        blank=True,
        verbose_name=_("Finished At"),
        help_text=_("When the work finished / Quando o trabalho terminou"),
    )

    class Meta:
        abstract = True

    def mark_finished(self):
        """
        Stamp the finish time without saving.
        Registra o horário de término sem salvar.
        """
        self.finished_at = timezone.now()

    @property
    def duration_seconds(self) -> float | None:
        created = getattr(self, "created_at", None)
        if self.finished_at is None or created is None:
            return None
        return (self.finished_at - created).total_seconds()
