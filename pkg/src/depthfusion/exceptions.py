# Exception Hierarchy - Depth Fusion Application
# Hierarquia de Exceções - Aplicação Depth Fusion

"""
Every error raised on purpose by the depth fusion package derives from
DepthFusionError. Each class carries a ``category`` string; the management
commands print it as ``[category] message`` and map it to an exit code.

Todo erro levantado intencionalmente pelo pacote deriva de DepthFusionError.
Cada classe carrega uma string ``category``; os comandos de gerenciamento a
imprimem como ``[category] mensagem`` e a mapeiam para um código de saída.
"""

from __future__ import annotations

from pathlib import Path


class DepthFusionError(Exception):
    """
    Base class for all depth fusion errors.
    Classe base para todos os erros do depth fusion.
    """

    category = "error"
    exit_code = 1


class ShapeError(DepthFusionError, ValueError):
    """Tensor shapes or dimensions do not satisfy an operation's contract."""

    category = "numeric"


class NonFiniteError(DepthFusionError, ArithmeticError):
    """
    A computation produced NaN or Inf.
    Uma computação produziu NaN ou Inf.
    """

    category = "numeric"

    def __init__(self, operation: str, detail: str = ""):
        self.operation = operation
        message = f"non-finite values produced by '{operation}'"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class GeometryError(DepthFusionError, ValueError):
    """Invalid camera, pose or depth-hypothesis parameters."""

    category = "geometry"


class ConfigurationError(DepthFusionError, ValueError):
    """
    One or more configuration fields are invalid.
    Um ou mais campos de configuração são inválidos.

    ``problems`` maps each offending key to its diagnostics so callers can
    report every problem at once instead of failing on the first.
    """

    category = "config"
    exit_code = 2

    def __init__(self, problems: dict[str, list[str]] | str):
        if isinstance(problems, str):
            problems = {"config": [problems]}
        self.problems = problems
        lines = [
            f"{key}: {message}"
            for key, messages in problems.items()
            for message in messages
        ]
        super().__init__("; ".join(lines))


class EvaluationError(DepthFusionError, ValueError):
    """Metrics or losses were requested on an empty or invalid pixel set."""

    category = "metrics"


class DatasetFormatError(DepthFusionError):
    """
    A dataset file is missing or malformed.
    Um arquivo do dataset está ausente ou malformado.

    The message names the file and, when known, the byte offset or line
    number where parsing stopped.
    """

    category = "dataset"

    def __init__(
        self,
        path: str | Path,
        message: str,
        *,
        offset: int | None = None,
        line: int | None = None,
    ):
        self.path = Path(path)
        self.offset = offset
        self.line = line
        where = str(self.path)
        if offset is not None:
            where = f"{where} (byte {offset})"
        elif line is not None:
            where = f"{where} (line {line})"
        super().__init__(f"{where}: {message}")


class SceneGenerationError(DepthFusionError):
    """The scene generator could not produce a usable scene."""

    category = "synth"


class CheckpointError(DepthFusionError):
    """A checkpoint is unreadable or does not match the model configuration."""

    category = "checkpoint"


class TrainingDivergedError(DepthFusionError):
    """
    Training produced a non-finite loss or gradient.
    O treino produziu uma loss ou gradiente não finito.
    """

    category = "training"

    def __init__(self, step: int, detail: str):
        self.step = step
        super().__init__(f"training diverged at step {step}: {detail}")
