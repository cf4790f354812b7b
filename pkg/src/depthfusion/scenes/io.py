# Dataset File Formats
# Formatos de Arquivo do Dataset

"""
Readers and writers for the on-disk formats:

- PFM: ``Pf`` (1 channel) or ``PF`` (3 channels), ``width height``, scale
  (negative = little-endian), float32 rows stored bottom-up
- camera text: 3 lines of the 3x3 intrinsic matrix followed by 4 lines of
  the 4x4 world-to-camera matrix; values are written with ``repr`` so they
  reload bit-exactly
- PGM preview: 8-bit depth normalized to [d_min, d_max] (Pillow)
- ``meta.txt``: INI ``[scene]`` section with flags, seed and frame count

Leitores e escritores dos formatos em disco. Erros apontam o arquivo e a
posição (byte ou linha) onde a leitura parou.
"""

from __future__ import annotations

import configparser
import logging
from pathlib import Path

import numpy as np
from PIL import Image

from depthfusion.exceptions import DatasetFormatError, GeometryError
from depthfusion.geometry import Intrinsics, Pose

logger = logging.getLogger(__name__)


# PFM


def write_pfm(path: Path, array: np.ndarray) -> None:
    """
    Write [H, W] or [3, H, W] data as little-endian float32 PFM.
    Escreve dados [H, W] ou [3, H, W] como PFM float32 little-endian.
    """
    array = np.asarray(array)
    if array.ndim == 3 and array.shape[0] == 1:
        array = array[0]
    if array.ndim == 2:
        header, pixels = "Pf", array
    elif array.ndim == 3 and array.shape[0] == 3:
        header, pixels = "PF", np.moveaxis(array, 0, -1)
    else:
        raise DatasetFormatError(path, f"cannot store array of shape {array.shape} as PFM")
    height, width = pixels.shape[:2]
    data = np.flipud(pixels).astype("<f4").tobytes()
    path = Path(path)
    with path.open("wb") as handle:
        handle.write(f"{header}\n{width} {height}\n-1.0\n".encode("ascii"))
        handle.write(data)


def _read_header_line(raw: bytes, offset: int, path: Path) -> tuple[str, int]:
    end = raw.find(b"\n", offset)
    if end < 0:
        raise DatasetFormatError(path, "header ended unexpectedly", offset=len(raw))
    try:
        return raw[offset:end].decode("ascii").strip(), end + 1
    except UnicodeDecodeError as exc:
        raise DatasetFormatError(path, "header is not ASCII", offset=offset) from exc


def read_pfm(path: Path) -> np.ndarray:
    """
    Read a PFM file into float64 [H, W] (``Pf``) or [3, H, W] (``PF``).
    Lê um arquivo PFM para float64.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DatasetFormatError(path, f"cannot read file: {exc}") from exc

    kind, offset = _read_header_line(raw, 0, path)
    if kind not in ("Pf", "PF"):
        raise DatasetFormatError(path, f"unknown PFM type '{kind}'", offset=0)
    dims_at = offset
    dims, offset = _read_header_line(raw, offset, path)
    try:
        width, height = (int(v) for v in dims.split())
    except ValueError as exc:
        raise DatasetFormatError(path, f"bad dimensions '{dims}'", offset=dims_at) from exc
    if width <= 0 or height <= 0:
        raise DatasetFormatError(path, f"non-positive dimensions '{dims}'", offset=dims_at)
    scale_at = offset
    scale_text, offset = _read_header_line(raw, offset, path)
    try:
        scale = float(scale_text)
    except ValueError as exc:
        raise DatasetFormatError(path, f"bad scale '{scale_text}'", offset=scale_at) from exc
    if scale == 0:
        raise DatasetFormatError(path, "scale must be non-zero", offset=scale_at)

    channels = 3 if kind == "PF" else 1
    expected = width * height * channels * 4
    available = len(raw) - offset
    if available < expected:
        raise DatasetFormatError(
            path,
            f"truncated pixel data: expected {expected} bytes, found {available}",
            offset=len(raw),
        )
    dtype = "<f4" if scale < 0 else ">f4"
    values = np.frombuffer(raw, dtype=dtype, count=width * height * channels, offset=offset)
    values = values.astype(np.float64)
    if channels == 1:
        return np.flipud(values.reshape(height, width)).copy()
    return np.moveaxis(np.flipud(values.reshape(height, width, 3)), -1, 0).copy()


# Camera files / Arquivos de câmera


def write_camera(path: Path, intrinsics: Intrinsics, pose: Pose) -> None:
    lines = [" ".join(repr(float(v)) for v in row) for row in intrinsics.matrix]
    lines += [" ".join(repr(float(v)) for v in row) for row in pose.matrix]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_camera(path: Path) -> tuple[Intrinsics, Pose]:
    """
    Parse a camera text file into (Intrinsics, Pose).
    Lê um arquivo de câmera em (Intrinsics, Pose).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise DatasetFormatError(path, f"cannot read camera file: {exc}") from exc
    rows: list[list[float]] = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([float(v) for v in line.split()])
        except ValueError as exc:
            raise DatasetFormatError(path, f"non-numeric value in '{line}'", line=number) from exc
        expected = 3 if len(rows) <= 3 else 4
        if len(rows[-1]) != expected:
            raise DatasetFormatError(
                path, f"expected {expected} values, found {len(rows[-1])}", line=number
            )
    if len(rows) != 7:
        raise DatasetFormatError(path, f"expected 7 matrix rows, found {len(rows)}")
    try:
        return Intrinsics.from_matrix(np.array(rows[:3])), Pose.from_matrix(np.array(rows[3:]))
    except GeometryError as exc:
        raise DatasetFormatError(path, str(exc)) from exc


# Previews / Pré-visualizações


def depth_to_preview(depth: np.ndarray, d_min: float, d_max: float) -> np.ndarray:
    """Map [d_min, d_max] linearly onto 0..255 (clipped)."""
    scaled = (np.asarray(depth, dtype=np.float64) - d_min) / (d_max - d_min)
    return np.round(np.clip(scaled, 0.0, 1.0) * 255.0).astype(np.uint8)


def write_pgm_preview(path: Path, depth: np.ndarray, d_min: float, d_max: float) -> None:
    Image.fromarray(depth_to_preview(depth, d_min, d_max)).save(Path(path), format="PPM")


# Scene metadata / Metadados da cena


def write_meta(path: Path, values: dict[str, object]) -> None:
    parser = configparser.ConfigParser()
    parser["scene"] = {key: str(value) for key, value in values.items()}
    with Path(path).open("w", encoding="utf-8") as handle:
        parser.write(handle)


def read_meta(path: Path) -> dict[str, str]:
    path = Path(path)
    parser = configparser.ConfigParser()
    try:
        with path.open(encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise DatasetFormatError(path, f"cannot read metadata: {exc}") from exc
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise DatasetFormatError(path, f"malformed metadata: {exc}", line=line) from exc
    if not parser.has_section("scene"):
        raise DatasetFormatError(path, "missing [scene] section")
    return dict(parser["scene"])
