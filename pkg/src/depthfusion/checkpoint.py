# Model Checkpoints
# Checkpoints do Modelo

"""
Binary checkpoint container plus an INI sidecar holding the model config.

Binary layout (all integers little-endian)::

    magic      4 bytes  b"DFCK"
    version    uint32   1
    count      uint32   number of tensors
    per tensor:
        name_len  uint16
        name      name_len bytes, UTF-8
        ndim      uint8
        dims      ndim x uint32
        data      prod(dims) x float64 (little-endian, C order)

The sidecar ``<checkpoint>.ini`` has a ``[model]`` section (ModelConfig
fields) and a ``[training]`` section (epoch, step, seed).

Contêiner binário de checkpoint mais um arquivo INI com a configuração.
"""

from __future__ import annotations

import configparser
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from depthfusion.exceptions import CheckpointError, ConfigurationError, ShapeError
from depthfusion.model import DepthFusionNet, ModelConfig, build_model
from depthfusion.scenes.dataset import parse_literal

logger = logging.getLogger(__name__)

MAGIC = b"DFCK"
VERSION = 1


@dataclass(frozen=True)
class CheckpointInfo:
    model: ModelConfig
    epoch: int = 0
    step: int = 0
    seed: int = 0
    extra: dict[str, str] = field(default_factory=dict)


def sidecar_path(path: Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".ini")


# Tensor container / Contêiner de tensores


def write_tensors(path: Path, tensors: dict[str, np.ndarray]) -> None:
    chunks = [MAGIC, struct.pack("<II", VERSION, len(tensors))]
    for name, array in tensors.items():
        encoded = name.encode("utf-8")
        array = np.ascontiguousarray(array, dtype="<f8")
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack(f"<B{array.ndim}I", array.ndim, *array.shape))
        chunks.append(array.tobytes())
    Path(path).write_bytes(b"".join(chunks))


def read_tensors(path: Path) -> dict[str, np.ndarray]:
    """
    Read a tensor container; errors name the byte offset.
    Lê um contêiner de tensores; erros indicam o byte.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc

    offset = 0

    def take(size: int) -> bytes:
        nonlocal offset
        if offset + size > len(raw):
            raise CheckpointError(
                f"{path} (byte {offset}): checkpoint is truncated, "
                f"needed {size} bytes, {len(raw) - offset} left"
            )
        chunk = raw[offset : offset + size]
        offset += size
        return chunk

    if take(4) != MAGIC:
        raise CheckpointError(f"{path} (byte 0): not a checkpoint file")
    version, count = struct.unpack("<II", take(8))
    if version != VERSION:
        raise CheckpointError(f"{path} (byte 4): unsupported version {version}")
    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<H", take(2))
        name = take(name_len).decode("utf-8", errors="replace")
        (ndim,) = struct.unpack("<B", take(1))
        dims = struct.unpack(f"<{ndim}I", take(4 * ndim))
        size = int(np.prod(dims, dtype=np.int64))
        data = np.frombuffer(take(8 * size), dtype="<f8").astype(np.float64)
        tensors[name] = data.reshape(dims)
    if offset != len(raw):
        raise CheckpointError(f"{path} (byte {offset}): trailing data after last tensor")
    return tensors


# Checkpoints / Checkpoints


def save_checkpoint(path: Path, model: DepthFusionNet, info: CheckpointInfo) -> Path:
    """
    Write parameters and the config sidecar.
    Escreve os parâmetros e o arquivo de configuração.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        write_tensors(path, model.state_dict())
        parser = configparser.ConfigParser()
        parser["model"] = {k: repr(v) for k, v in info.model.to_dict().items()}
        parser["training"] = {
            "epoch": str(info.epoch),
            "step": str(info.step),
            "seed": str(info.seed),
            **info.extra,
        }
        with sidecar_path(path).open("w", encoding="utf-8") as handle:
            parser.write(handle)
    except OSError as exc:
        raise CheckpointError(f"cannot write checkpoint {path}: {exc}") from exc
    logger.debug(f"Saved checkpoint {path} ({len(model.state_dict())} tensors)")
    return path


def read_info(path: Path) -> CheckpointInfo:
    ini = sidecar_path(path)
    parser = configparser.ConfigParser()
    try:
        with ini.open(encoding="utf-8") as handle:
            parser.read_file(handle)
        values = {key: parse_literal(text) for key, text in parser["model"].items()}
        model = ModelConfig.from_dict(values)
        training = dict(parser["training"]) if parser.has_section("training") else {}
        epoch = int(training.pop("epoch", 0))
        step = int(training.pop("step", 0))
        seed = int(training.pop("seed", 0))
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint config {ini}: {exc}") from exc
    except (configparser.Error, KeyError, ValueError, ConfigurationError) as exc:
        raise CheckpointError(f"malformed checkpoint config {ini}: {exc}") from exc
    return CheckpointInfo(model=model, epoch=epoch, step=step, seed=seed, extra=training)


def load_checkpoint(
    path: Path, expected: ModelConfig | None = None
) -> tuple[DepthFusionNet, CheckpointInfo]:
    """
    Rebuild the model stored at ``path``.
    Reconstrói o modelo armazenado em ``path``.

    With ``expected`` set, the stored architecture must match it.
    """
    info = read_info(path)
    if expected is not None and expected != info.model:
        differing = sorted(
            key
            for key, value in expected.to_dict().items()
            if info.model.to_dict().get(key) != value
        )
        raise CheckpointError(
            f"checkpoint {path} was trained with a different model config: {differing}"
        )
    model = build_model(info.model, info.seed)
    try:
        model.load_state_dict(read_tensors(path))
    except ShapeError as exc:
        raise CheckpointError(f"checkpoint {path} does not fit its config: {exc}") from exc
    return model, info
