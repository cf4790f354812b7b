# Ablation Driver
# Driver de Ablação

"""
Train and evaluate every variant of one architecture axis under the same
seeds and step budget, then summarise each variant by its median metrics.

- ``fusion`` axis: concat, cross_attention, proposed
- ``backbone`` axis: conv_only, mamba_plain, depth_mamba

Treina e avalia cada variante de um eixo da arquitetura com as mesmas
sementes e orçamento, resumindo cada variante pela mediana das métricas.
"""

from __future__ import annotations

import csv
import logging
import statistics
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from depthfusion.config import RunConfig
from depthfusion.decorators import log_execution_time
from depthfusion.exceptions import ConfigurationError
from depthfusion.harness.evaluation import evaluate
from depthfusion.harness.training import train
from depthfusion.metrics import MetricsReport
from depthfusion.scenes.dataset import load_dataset
from depthfusion.scenes.synth import SceneSample

logger = logging.getLogger(__name__)

ABLATION_AXES: dict[str, tuple[str, ...]] = {
    "fusion": ("concat", "cross_attention", "proposed"),
    "backbone": ("conv_only", "mamba_plain", "depth_mamba"),
}


@dataclass
class VariantResult:
    variant: str
    parameter_count: int
    reports: dict[int, MetricsReport] = field(default_factory=dict)

    def median(self, metric: str) -> float:
        return float(statistics.median(getattr(r, metric) for r in self.reports.values()))

    def row(self) -> list[object]:
        return [
            self.variant,
            self.median("abs_rel"),
            self.median("sq_rel"),
            self.median("rmse"),
            self.parameter_count,
            len(self.reports),
        ]


TABLE_HEADER = ["variant", "abs_rel", "sq_rel", "rmse", "parameters", "seeds"]

ReportCallback = Callable[[str, int, MetricsReport], None]


@log_execution_time
def ablate(
    config: RunConfig,
    axis: str,
    out_dir: Path,
    train_samples: Sequence[SceneSample] | None = None,
    eval_samples: Sequence[SceneSample] | None = None,
    on_report: ReportCallback | None = None,
) -> list[VariantResult]:
    """
    Run the ablation for ``axis``; one VariantResult per variant, in axis order.
    Executa a ablação de ``axis``; um VariantResult por variante.
    """
    if axis not in ABLATION_AXES:
        raise ConfigurationError(
            {"axis": [f"unknown ablation axis '{axis}', expected {tuple(ABLATION_AXES)}"]}
        )
    out_dir = Path(out_dir)
    if train_samples is None:
        train_samples = load_dataset(Path(config.dataset))
    if eval_samples is None:
        eval_samples = load_dataset(config.eval_dataset_path)

    results = []
    for variant in ABLATION_AXES[axis]:
        result: VariantResult | None = None
        for seed in config.seeds:
            variant_config = config.replace(**{axis: variant, "seed": seed})
            trained = train(
                variant_config, out_dir / variant / f"seed_{seed}", samples=train_samples
            )
            if result is None:
                result = VariantResult(variant, trained.model.parameter_count())
            report = evaluate(
                trained.model,
                eval_samples,
                noise_seed=config.noise_seed,
                max_depth=config.max_depth,
                sq_rel_convention=config.sq_rel_convention,
                workers=config.workers,
            )
            result.reports[seed] = report
            if on_report is not None:
                on_report(variant, seed, report)
            logger.info(f"{axis}={variant} seed={seed}: AbsRel {report.abs_rel:.4f}")
        assert result is not None
        results.append(result)
    return results


def write_ablation_table(path: Path, results: Sequence[VariantResult]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(TABLE_HEADER)
        for result in results:
            writer.writerow(result.row())
    return path


def format_ablation_table(results: Sequence[VariantResult]) -> str:
    """Plain-text table: variant x {AbsRel, SqRel, RMSE}, medians over seeds."""
    width = max(len(r.variant) for r in results)
    lines = [f"{'variant':<{width}}  AbsRel   SqRel    RMSE     params"]
    for r in results:
        lines.append(
            f"{r.variant:<{width}}  {r.median('abs_rel'):.4f}   {r.median('sq_rel'):.4f}   "
            f"{r.median('rmse'):.4f}   {r.parameter_count}"
        )
    return "\n".join(lines)
