# Synthetic Dataset Layout
# Layout do Dataset Sintético

"""
Dataset directory layout / Layout do diretório do dataset::

    <root>/manifest.ini            scene count, master seed, SceneConfig
    <root>/scene_00000/frame_0.pfm
    <root>/scene_00000/frame_0.cam
    <root>/scene_00000/gt_depth.pfm
    <root>/scene_00000/meta.txt

Scene ``i`` is generated from ``derive_seed(master_seed, i)``, so a
dataset can be regenerated from its manifest alone.
"""

from __future__ import annotations

import ast
import configparser
import logging
import re
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path
from typing import Any

import numpy as np

from depthfusion.decorators import log_execution_time
from depthfusion.exceptions import DatasetFormatError
from depthfusion.head import DepthMap
from depthfusion.scenes.io import (
    read_camera,
    read_meta,
    read_pfm,
    write_camera,
    write_meta,
    write_pfm,
)
from depthfusion.scenes.synth import (
    SceneConfig,
    SceneFlags,
    SceneSample,
    derive_seed,
    generate_scene,
)

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.ini"
SCENE_PATTERN = re.compile(r"^scene_(\d{5})$")
FRAME_PATTERN = re.compile(r"^frame_(\d+)\.(pfm|cam)$")


def scene_dir(root: Path, index: int) -> Path:
    return Path(root) / f"scene_{index:05d}"


# Writing / Escrita


def write_sample(directory: Path, sample: SceneSample) -> None:
    """
    Store one SceneSample in ``directory``.
    Armazena uma SceneSample em ``directory``.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for index, (frame, intrinsics, pose) in enumerate(
        zip(sample.frames, sample.intrinsics, sample.poses, strict=True)
    ):
        write_pfm(directory / f"frame_{index}.pfm", frame)
        write_camera(directory / f"frame_{index}.cam", intrinsics, pose)
    write_pfm(directory / "gt_depth.pfm", sample.gt_depth.array)
    write_meta(
        directory / "meta.txt",
        {
            "seed": sample.seed,
            "n_frames": sample.n_frames,
            "reference_index": sample.reference_index,
            "texture_level": repr(sample.flags.texture_level),
            "has_dynamic_object": sample.flags.has_dynamic_object,
        },
    )


def _generate_and_write(args: tuple[SceneConfig, int, Path]) -> Path:
    config, seed, directory = args
    write_sample(directory, generate_scene(config, seed))
    return directory


def write_manifest(root: Path, config: SceneConfig, n_scenes: int) -> Path:
    parser = configparser.ConfigParser()
    parser["dataset"] = {"n_scenes": str(n_scenes), "master_seed": str(config.seed)}
    parser["scene"] = {key: repr(value) for key, value in config.to_dict().items()}
    path = Path(root) / MANIFEST_NAME
    with path.open("w", encoding="utf-8") as handle:
        parser.write(handle)
    return path


def read_manifest(root: Path) -> tuple[SceneConfig, int]:
    """Return the SceneConfig and scene count recorded in a dataset manifest."""
    path = Path(root) / MANIFEST_NAME
    parser = configparser.ConfigParser()
    try:
        with path.open(encoding="utf-8") as handle:
            parser.read_file(handle)
        n_scenes = parser.getint("dataset", "n_scenes")
        values: dict[str, Any] = {}
        for entry in fields(SceneConfig):
            if parser.has_option("scene", entry.name):
                values[entry.name] = parse_literal(parser.get("scene", entry.name))
    except OSError as exc:
        raise DatasetFormatError(path, f"cannot read manifest: {exc}") from exc
    except (configparser.Error, ValueError) as exc:
        raise DatasetFormatError(path, f"malformed manifest: {exc}") from exc
    return SceneConfig(**values), n_scenes


def parse_literal(text: str) -> Any:
    """Inverse of ``repr`` for the scalar values stored in INI manifests."""
    try:
        return ast.literal_eval(text.strip())
    except (SyntaxError, ValueError) as exc:
        raise ValueError(f"not a literal value: {text!r}") from exc


@log_execution_time
def make_dataset(
    config: SceneConfig, n_scenes: int, out_dir: Path, workers: int = 1
) -> Path:
    """
    Generate ``n_scenes`` scenes under ``out_dir`` plus a manifest.
    Gera ``n_scenes`` cenas em ``out_dir`` com um manifesto.
    """
    if n_scenes < 0:
        raise DatasetFormatError(out_dir, f"scene count must be >= 0, got {n_scenes}")
    root = Path(out_dir)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DatasetFormatError(root, f"cannot create dataset directory: {exc}") from exc
    jobs = [(config, derive_seed(config.seed, i), scene_dir(root, i)) for i in range(n_scenes)]
    if workers > 1 and n_scenes > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            list(pool.map(_generate_and_write, jobs))
    else:
        for job in jobs:
            _generate_and_write(job)
    write_manifest(root, config, n_scenes)
    logger.info(f"Wrote {n_scenes} scenes to {root}")
    return root


# Reading / Leitura


def load_sample(directory: Path) -> SceneSample:
    """
    Load one scene directory written by write_sample.
    Carrega um diretório de cena escrito por write_sample.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetFormatError(directory, "scene directory does not exist")
    images: dict[int, Path] = {}
    cameras: dict[int, Path] = {}
    for entry in directory.iterdir():
        match = FRAME_PATTERN.match(entry.name)
        if match:
            target = images if match.group(2) == "pfm" else cameras
            target[int(match.group(1))] = entry
    if sorted(images) != sorted(cameras):
        raise DatasetFormatError(
            directory,
            f"frame/camera mismatch: {len(images)} images {sorted(images)}, "
            f"{len(cameras)} cameras {sorted(cameras)}",
        )
    indices = sorted(images)
    if indices != list(range(len(indices))):
        raise DatasetFormatError(directory, f"frame indices are not contiguous: {indices}")

    meta = read_meta(directory / "meta.txt")
    try:
        seed = int(meta["seed"])
        n_frames = int(meta["n_frames"])
        texture_level = float(meta["texture_level"])
        dynamic = meta["has_dynamic_object"] == "True"
    except (KeyError, ValueError) as exc:
        raise DatasetFormatError(directory / "meta.txt", f"bad metadata: {exc}") from exc
    if n_frames != len(indices):
        raise DatasetFormatError(
            directory / "meta.txt",
            f"metadata lists {n_frames} frames, directory holds {len(indices)}",
        )

    frames = []
    for index in indices:
        frame = read_pfm(images[index])
        frames.append(frame[None] if frame.ndim == 2 else frame)
    calibrations = [read_camera(cameras[index]) for index in indices]
    depth = read_pfm(directory / "gt_depth.pfm")
    if depth.ndim != 2 or depth.shape != frames[0].shape[1:]:
        raise DatasetFormatError(
            directory / "gt_depth.pfm",
            f"depth shape {depth.shape} does not match frames {frames[0].shape}",
        )
    return SceneSample(
        frames=tuple(frames),
        intrinsics=tuple(k for k, _ in calibrations),
        poses=tuple(p for _, p in calibrations),
        gt_depth=DepthMap.from_array(depth, np.isfinite(depth) & (depth > 0)),
        flags=SceneFlags(texture_level=texture_level, has_dynamic_object=dynamic),
        seed=seed,
    )


def list_scenes(root: Path) -> list[Path]:
    root = Path(root)
    if not root.is_dir():
        raise DatasetFormatError(root, "dataset directory does not exist")
    return sorted(p for p in root.iterdir() if p.is_dir() and SCENE_PATTERN.match(p.name))


def iter_dataset(root: Path) -> Iterator[SceneSample]:
    for directory in list_scenes(root):
        yield load_sample(directory)


def load_dataset(root: Path) -> list[SceneSample]:
    samples = list(iter_dataset(root))
    if not samples:
        raise DatasetFormatError(root, "dataset contains no scenes")
    return samples
