# Pose-Noise Robustness Benchmark
# Benchmark de Robustez a Ruído de Pose

"""
Evaluate one model over the full sigma_rot x sigma_trans grid and report
each metric relative to the noise-free evaluation.

Avalia um modelo sobre toda a grade sigma_rot x sigma_trans e reporta cada
métrica relativa à avaliação sem ruído.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from depthfusion.config import RunConfig
from depthfusion.decorators import log_execution_time
from depthfusion.exceptions import ConfigurationError
from depthfusion.harness.evaluation import evaluate
from depthfusion.metrics import MetricsReport
from depthfusion.model import DepthFusionNet
from depthfusion.scenes.synth import SceneSample

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ("abs_rel", "sq_rel", "rmse", "delta1", "delta2", "delta3")
RATIO_COLUMNS = ("abs_rel", "sq_rel", "rmse")
CSV_HEADER = (
    ["sigma_rot", "sigma_trans", *METRIC_COLUMNS, "n_pixels"]
    + [f"{name}_ratio" for name in RATIO_COLUMNS]
)


def degradation_ratio(noisy: float, clean: float) -> float:
    """metric(sigma) / metric(0); two exact zeros count as no degradation."""
    if clean == 0.0:
        return 1.0 if noisy == 0.0 else math.inf
    return noisy / clean


@dataclass(frozen=True)
class NoiseCell:
    sigma_rot: float
    sigma_trans: float
    report: MetricsReport
    ratios: dict[str, float]

    def row(self) -> list[object]:
        metrics = [getattr(self.report, name) for name in METRIC_COLUMNS]
        ratios = [self.ratios[name] for name in RATIO_COLUMNS]
        return [self.sigma_rot, self.sigma_trans, *metrics, self.report.n_pixels, *ratios]


@log_execution_time
def bench_noise(
    model: DepthFusionNet, samples: Sequence[SceneSample], config: RunConfig
) -> tuple[MetricsReport, list[NoiseCell]]:
    """
    Grid of MetricsReports with degradation ratios against zero noise.
    Grade de MetricsReports com razões de degradação contra ruído zero.

    Returns the noise-free report and one cell per grid point, rot-major.
    """
    grid = config.noise_grid
    if not grid:
        raise ConfigurationError({"sigma_rot": ["noise grid is empty"]})

    def run(sigma_rot: float, sigma_trans: float) -> MetricsReport:
        return evaluate(
            model,
            samples,
            sigma_rot,
            sigma_trans,
            noise_seed=config.noise_seed,
            all_poses=config.noise_all_poses,
            max_depth=config.max_depth,
            sq_rel_convention=config.sq_rel_convention,
            workers=config.workers,
        )

    reports: dict[tuple[float, float], MetricsReport] = {}
    clean = run(0.0, 0.0)
    reports[(0.0, 0.0)] = clean
    cells = []
    for sigma_rot, sigma_trans in grid:
        key = (float(sigma_rot), float(sigma_trans))
        if key not in reports:
            reports[key] = run(*key)
        report = reports[key]
        ratios = {
            name: degradation_ratio(getattr(report, name), getattr(clean, name))
            for name in RATIO_COLUMNS
        }
        cells.append(NoiseCell(key[0], key[1], report, ratios))
        logger.info(
            f"rot={key[0]} trans={key[1]}: AbsRel {report.abs_rel:.4f} "
            f"(x{ratios['abs_rel']:.3f})"
        )
    return clean, cells


def write_noise_table(path: Path, cells: Sequence[NoiseCell]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER)
        for cell in cells:
            writer.writerow(cell.row())
    return path


def write_noise_json(path: Path, cells: Sequence[NoiseCell]) -> Path:
    payload = [
        {"report": cell.report.to_dict(), "ratios": cell.ratios} for cell in cells
    ]
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
    return Path(path)
