# Run Configuration
# Configuração de Execução

"""
RunConfig: every knob of the harness, validated at load.

Values are layered, later layers winning:

1. field defaults of RunConfig
2. ``settings.DEPTH_FUSION`` (from environment / ``.env`` via decouple)
3. a run config file: INI with a ``[settings]`` section, read through
   ``decouple.Config(RepositoryIni(path))``
4. command-line overrides

All problems are collected and raised together as one ConfigurationError
whose ``problems`` map names every offending key.

Camadas de configuração: padrões, settings, arquivo INI e linha de comando.
Todos os problemas são coletados e reportados juntos.
"""

from __future__ import annotations

import configparser
import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass, fields, replace
from importlib import metadata
from pathlib import Path
from typing import Any

from decouple import Config, Csv, RepositoryIni
from django.conf import settings
from django.core.exceptions import ValidationError

from depthfusion.backbone import BACKBONE_KINDS
from depthfusion.exceptions import ConfigurationError
from depthfusion.fusion import FUSION_MODES
from depthfusion.metrics import SQ_REL_CONVENTIONS
from depthfusion.model import ModelConfig
from depthfusion.scenes.synth import SceneConfig
from depthfusion.validators import (
    ChoiceValidator,
    RangeValidator,
    validate_multiple_of,
    validate_noise_levels,
    validate_positive_int,
    validate_seed,
    validate_seed_list,
    validation_messages,
)

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.ini"
SETTINGS_SECTION = "settings"


def _optional_float(value: Any) -> float | None:
    if value is None:
        return None
    text = str(value).strip()
    if text in ("", "None", "none"):
        return None
    return float(text)


def _boolean(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {value!r}")


@dataclass(frozen=True)
class RunConfig:
    """
    Resolved configuration of one harness run.
    Configuração resolvida de uma execução do harness.
    """

    dataset: str = "data/desk"
    eval_dataset: str = ""
    image_size: int = 32
    image_channels: int = 1
    n_frames: int = 3
    n_hypotheses: int = 16
    d_min: float = 2.0
    d_max: float = 20.0
    channels: int = 8
    groups: int = 4
    state_dim: int = 4
    blocks_per_stage: int = 2
    hidden: int = 8
    backbone: str = "depth_mamba"
    fusion: str = "proposed"
    lr_max: float = 1e-4
    weight_decay: float = 1e-2
    epochs: int = 40
    max_steps: int = 500
    batch_size: int = 1
    log_every: int = 10
    seed: int = 0
    seeds: tuple[int, ...] = (0, 1, 2)
    sigma_rot: tuple[float, ...] = (0.0, 0.25, 0.5, 1.0, 2.0)
    sigma_trans: tuple[float, ...] = (0.0, 0.01, 0.02, 0.05)
    noise_seed: int = 0
    noise_all_poses: bool = False
    sq_rel_convention: str = "ratio"
    max_depth: float | None = None
    output_dir: str = "runs"
    workers: int = 1

    def __post_init__(self) -> None:
        problems = run_config_problems(self.to_dict())
        if problems:
            raise ConfigurationError(problems)

    # Derived configurations / Configurações derivadas

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            backbone=self.backbone,
            fusion=self.fusion,
            in_channels=self.image_channels,
            channels=self.channels,
            groups=self.groups,
            state_dim=self.state_dim,
            blocks_per_stage=self.blocks_per_stage,
            attention_hidden=self.hidden,
            regression_hidden=self.hidden,
            n_hypotheses=self.n_hypotheses,
            d_min=self.d_min,
            d_max=self.d_max,
        )

    def scene_config(self, seed: int | None = None) -> SceneConfig:
        return SceneConfig(
            height=self.image_size,
            width=self.image_size,
            n_frames=self.n_frames,
            channels=self.image_channels,
            d_min=self.d_min,
            d_max=self.d_max,
            seed=self.seed if seed is None else seed,
        )

    @property
    def noise_grid(self) -> list[tuple[float, float]]:
        return [(rot, trans) for rot in self.sigma_rot for trans in self.sigma_trans]

    @property
    def eval_dataset_path(self) -> Path:
        return Path(self.eval_dataset or self.dataset)

    def replace(self, **changes: Any) -> RunConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_settings(self) -> dict[str, str]:
        """String form used by run config files and manifests."""
        return {name: _format_value(value) for name, value in self.to_dict().items()}


def _format_value(value: Any) -> str:
    if isinstance(value, tuple | list):
        return ", ".join(repr(v) for v in value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


# Field casts (file text -> value) / Conversões de campo

CASTS: dict[str, Callable[[Any], Any]] = {
    "dataset": str,
    "eval_dataset": str,
    "image_size": int,
    "image_channels": int,
    "n_frames": int,
    "n_hypotheses": int,
    "d_min": float,
    "d_max": float,
    "channels": int,
    "groups": int,
    "state_dim": int,
    "blocks_per_stage": int,
    "hidden": int,
    "backbone": str,
    "fusion": str,
    "lr_max": float,
    "weight_decay": float,
    "epochs": int,
    "max_steps": int,
    "batch_size": int,
    "log_every": int,
    "seed": int,
    "seeds": Csv(cast=int, post_process=tuple),
    "sigma_rot": Csv(cast=float, post_process=tuple),
    "sigma_trans": Csv(cast=float, post_process=tuple),
    "noise_seed": int,
    "noise_all_poses": _boolean,
    "sq_rel_convention": str,
    "max_depth": _optional_float,
    "output_dir": str,
    "workers": int,
}


# Field validators / Validadores de campo

FIELD_VALIDATORS: dict[str, list[Callable[[Any], None]]] = {
    "image_size": [validate_multiple_of(4)],
    "image_channels": [ChoiceValidator((1, 3))],
    "n_frames": [RangeValidator(min_value=2)],
    "n_hypotheses": [RangeValidator(min_value=2)],
    "d_min": [RangeValidator(min_value=0.0, inclusive_min=False)],
    "d_max": [RangeValidator(min_value=0.0, inclusive_min=False)],
    "channels": [validate_positive_int],
    "groups": [validate_positive_int],
    "state_dim": [validate_positive_int],
    "blocks_per_stage": [validate_positive_int],
    "hidden": [validate_positive_int],
    "backbone": [ChoiceValidator(BACKBONE_KINDS)],
    "fusion": [ChoiceValidator(FUSION_MODES)],
    "lr_max": [RangeValidator(min_value=0.0, inclusive_min=False)],
    "weight_decay": [RangeValidator(min_value=0.0)],
    "epochs": [validate_positive_int],
    "max_steps": [validate_positive_int],
    "batch_size": [validate_positive_int],
    "log_every": [validate_positive_int],
    "seed": [validate_seed],
    "seeds": [validate_seed_list],
    "sigma_rot": [validate_noise_levels],
    "sigma_trans": [validate_noise_levels],
    "noise_seed": [validate_seed],
    "sq_rel_convention": [ChoiceValidator(SQ_REL_CONVENTIONS)],
    "workers": [validate_positive_int],
}


def run_config_problems(values: Mapping[str, Any]) -> dict[str, list[str]]:
    """
    Diagnostics for every invalid field, keyed by field name.
    Diagnósticos de todos os campos inválidos, por nome de campo.
    """
    problems: dict[str, list[str]] = {}

    def add(key: str, message: str) -> None:
        problems.setdefault(key, []).append(message)

    for key, validators in FIELD_VALIDATORS.items():
        if key not in values:
            continue
        for validator in validators:
            try:
                validator(values[key])
            except ValidationError as exc:
                for message in validation_messages(exc):
                    add(key, message)
                break

    if not str(values.get("dataset", "")).strip():
        add("dataset", "Dataset path must not be empty.")
    if not str(values.get("output_dir", "")).strip():
        add("output_dir", "Output directory must not be empty.")
    d_min, d_max = values.get("d_min"), values.get("d_max")
    if "d_min" not in problems and "d_max" not in problems and not d_min < d_max:
        add("d_min", f"Need d_min < d_max, got {d_min} >= {d_max}.")
    channels, groups = values.get("channels"), values.get("groups")
    if "channels" not in problems and "groups" not in problems and channels % groups:
        add("groups", f"{channels} channels cannot be split into {groups} groups.")
    max_depth = values.get("max_depth")
    if max_depth is not None:
        try:
            RangeValidator(min_value=0.0, inclusive_min=False)(max_depth)
        except ValidationError as exc:
            for message in validation_messages(exc):
                add("max_depth", message)
    if not isinstance(values.get("noise_all_poses", False), bool):
        add("noise_all_poses", "Expected a boolean.")
    return problems


# Loading / Carregamento


def settings_defaults() -> dict[str, Any]:
    """RunConfig defaults overridden by ``settings.DEPTH_FUSION``."""
    base = {f.name: f.default for f in fields(RunConfig)}
    if not settings.configured:
        return base
    configured = dict(getattr(settings, "DEPTH_FUSION", {}))
    unknown = sorted(set(configured) - set(base))
    if unknown:
        raise ConfigurationError(
            {key: ["Unknown key in settings.DEPTH_FUSION."] for key in unknown}
        )
    for key, value in configured.items():
        base[key] = CASTS[key](value) if isinstance(value, str) else value
    for key in ("seeds", "sigma_rot", "sigma_trans"):
        base[key] = tuple(base[key])
    return base


def read_config_file(path: Path) -> tuple[dict[str, Any], dict[str, list[str]]]:
    """
    Parse a run config file; returns (values, problems).
    Lê um arquivo de configuração; retorna (valores, problemas).
    """
    path = Path(path)
    problems: dict[str, list[str]] = {}
    try:
        repository = RepositoryIni(str(path))
    except OSError as exc:
        raise ConfigurationError({"config": [f"Cannot read {path}: {exc}"]}) from exc
    except configparser.Error as exc:
        raise ConfigurationError({"config": [f"Malformed config file {path}: {exc}"]}) from exc
    parser = repository.parser
    if not parser.has_section(SETTINGS_SECTION):
        raise ConfigurationError({"config": [f"{path} has no [{SETTINGS_SECTION}] section"]})
    reader = Config(repository)
    values: dict[str, Any] = {}
    for key in parser.options(SETTINGS_SECTION):
        if key not in CASTS:
            problems.setdefault(key, []).append("Unknown configuration key.")
            continue
        try:
            values[key] = reader(key, cast=CASTS[key])
        except ValueError as exc:
            problems.setdefault(key, []).append(f"Cannot parse value: {exc}")
    return values, problems


def load_run_config(
    path: Path | None = None, overrides: Mapping[str, Any] | None = None
) -> RunConfig:
    """
    Resolve a RunConfig from settings, an optional file and overrides.
    Resolve um RunConfig a partir de settings, arquivo opcional e overrides.
    """
    values = settings_defaults()
    problems: dict[str, list[str]] = {}
    if path is not None:
        from_file, problems = read_config_file(path)
        values.update(from_file)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in CASTS:
            problems.setdefault(key, []).append("Unknown configuration key.")
            continue
        values[key] = tuple(value) if isinstance(value, list) else value
    for key, messages in run_config_problems(values).items():
        problems.setdefault(key, []).extend(messages)
    if problems:
        raise ConfigurationError(problems)
    config = RunConfig(**values)
    logger.debug(f"Resolved run config: {config.to_settings()}")
    return config


def check_config_file(path: Path) -> dict[str, list[str]]:
    """
    Every diagnostic for a config file (empty when valid).
    Todos os diagnósticos de um arquivo de configuração (vazio se válido).
    """
    try:
        load_run_config(path)
    except ConfigurationError as exc:
        return exc.problems
    return {}


# Manifests / Manifestos


def package_version() -> str:
    try:
        return metadata.version("depth-fusion-bench")
    except metadata.PackageNotFoundError:
        return "unknown"


def write_manifest(
    out_dir: Path, config: RunConfig, command: str, **run_info: Any
) -> Path:
    """
    Write ``manifest.ini``: the resolved config plus run details.
    Escreve ``manifest.ini``: configuração resolvida e detalhes da execução.

    The file is itself a valid run config (``--config manifest.ini``).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    parser = configparser.ConfigParser(interpolation=None)
    parser[SETTINGS_SECTION] = config.to_settings()
    parser["run"] = {
        "command": command,
        "version": package_version(),
        **{key: _format_value(value) for key, value in run_info.items()},
    }
    path = out_dir / MANIFEST_NAME
    with path.open("w", encoding="utf-8") as handle:
        parser.write(handle)
    logger.debug(f"Wrote run manifest {path}")
    return path
