"""
Django Admin Customizations - Depth Fusion Application
Customizações do Django Admin - Aplicação Depth Fusion

Browse harness runs and their metrics in the admin:
- Runs filterable by command and status, with inline metrics
- Metrics filterable by label and noise cell

Navegue pelas execuções do harness e suas métricas no admin.
"""

from django.contrib import admin

from .models import ExperimentRun, MetricsRecord


class MetricsRecordInline(admin.TabularInline):
    model = MetricsRecord
    extra = 0
    fields = ("label", "seed", "sigma_rot", "sigma_trans", "abs_rel", "sq_rel", "rmse")
    readonly_fields = fields
    can_delete = False


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    """
    Admin configuration for harness runs.
    Configuração admin para execuções do harness.
    """

    list_display = ("id", "command", "status", "seed", "output_dir", "created_at", "finished_at")
    list_filter = ("command", "status", "created_at")
    search_fields = ("output_dir", "error_message")
    readonly_fields = ("created_at", "updated_at", "finished_at", "config")
    inlines = [MetricsRecordInline]


@admin.register(MetricsRecord)
class MetricsRecordAdmin(admin.ModelAdmin):
    list_display = (
        "run",
        "label",
        "sigma_rot",
        "sigma_trans",
        "seed",
        "abs_rel",
        "sq_rel",
        "rmse",
        "delta1",
    )
    list_filter = ("label", "sigma_rot", "sigma_trans")
    readonly_fields = ("created_at", "updated_at")
