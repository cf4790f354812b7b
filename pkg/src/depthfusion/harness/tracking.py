# Run Registry Tracking
# Rastreamento no Registro de Execuções

"""
Records harness runs and their metrics in the database.

Registry writes never break a run: database errors are logged as warnings
and the run carries on without a registry entry.

Registra execuções do harness e suas métricas no banco de dados. Erros de
banco são logados e a execução continua.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

from django.db import DatabaseError

from depthfusion.config import RunConfig
from depthfusion.metrics import MetricsReport
from depthfusion.models import ExperimentRun, MetricsRecord

logger = logging.getLogger(__name__)


def start_run(command: str, config: RunConfig, output_dir: Path) -> ExperimentRun | None:
    try:
        return ExperimentRun.objects.create(
            command=command,
            seed=config.seed,
            config=config.to_settings(),
            output_dir=str(output_dir),
        )
    except DatabaseError as exc:
        logger.warning(f"Run registry unavailable, not recording '{command}': {exc}")
        return None


def finish_run(run: ExperimentRun | None, error: BaseException | None = None) -> None:
    if run is None:
        return
    try:
        if error is None:
            run.complete()
        else:
            run.fail(getattr(error, "category", type(error).__name__), str(error))
    except DatabaseError as exc:
        logger.warning(f"Could not update run {run.pk}: {exc}")


def record_metrics(
    run: ExperimentRun | None, report: MetricsReport, **fields: Any
) -> MetricsRecord | None:
    """
    Store one MetricsReport for ``run``; returns None when nothing was stored.
    Armazena um MetricsReport para ``run``.
    """
    if run is None:
        return None
    try:
        record = MetricsRecord.from_report(run, report, **fields)
        record.save()
        return record
    except DatabaseError as exc:
        logger.warning(f"Could not store metrics for run {run.pk}: {exc}")
        return None


@contextmanager
def track_run(command: str, config: RunConfig, output_dir: Path) -> Iterator[ExperimentRun | None]:
    """
    Context manager wrapping one command in an ExperimentRun.
    Gerenciador de contexto que envolve um comando em um ExperimentRun.

    Usage:
        with track_run("eval", config, out_dir) as run:
            record_metrics(run, report)
    """
    run = start_run(command, config, output_dir)
    try:
        yield run
    except Exception as exc:
        finish_run(run, exc)
        raise
    finish_run(run)
