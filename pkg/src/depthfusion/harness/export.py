# Depth Map Export
# Exportação de Mapas de Profundidade

"""
Write predicted depth and confidence for every scene of a dataset:

    scene_00000_depth.pfm        float depth (meters)
    scene_00000_confidence.pfm   confidence in [0, 1]
    scene_00000_depth.pgm        8-bit preview, [d_min, d_max] -> [0, 255]

Grava profundidade e confiança preditas para cada cena de um dataset.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path

from depthfusion.autodiff import no_grad
from depthfusion.decorators import log_execution_time
from depthfusion.exceptions import DatasetFormatError
from depthfusion.model import DepthFusionNet, forward_pipeline
from depthfusion.scenes.io import write_pfm, write_pgm_preview
from depthfusion.scenes.synth import SceneSample

logger = logging.getLogger(__name__)


def export_paths(out_dir: Path, index: int) -> tuple[Path, Path, Path]:
    stem = Path(out_dir) / f"scene_{index:05d}"
    return (
        stem.with_name(f"{stem.name}_depth.pfm"),
        stem.with_name(f"{stem.name}_confidence.pfm"),
        stem.with_name(f"{stem.name}_depth.pgm"),
    )


@log_execution_time
def export_maps(
    model: DepthFusionNet, samples: Sequence[SceneSample], out_dir: Path
) -> list[Path]:
    """
    Predict and write three files per scene; returns every written path.
    Prediz e grava três arquivos por cena; retorna os caminhos gravados.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DatasetFormatError(out_dir, f"cannot create export directory: {exc}") from exc
    d_min, d_max = model.config.d_min, model.config.d_max
    written: list[Path] = []
    for index, sample in enumerate(samples):
        with no_grad():
            output = forward_pipeline(sample, model)
        depth_path, confidence_path, preview_path = export_paths(out_dir, index)
        try:
            write_pfm(depth_path, output.depth.array)
            write_pfm(confidence_path, output.confidence.values)
            write_pgm_preview(preview_path, output.depth.array, d_min, d_max)
        except OSError as exc:
            raise DatasetFormatError(
                out_dir, f"cannot write maps for scene {index}: {exc}"
            ) from exc
        written += [depth_path, confidence_path, preview_path]
    logger.info(f"Exported {len(samples)} scenes to {out_dir}")
    return written
