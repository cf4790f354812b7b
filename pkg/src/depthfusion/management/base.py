"""
Shared base for the harness management commands.
Base compartilhada dos comandos de gerenciamento do harness.

Each command resolves a RunConfig (settings, ``--config`` file, flags),
writes ``manifest.ini`` into its output directory ``<output_dir>/<command>``,
records an ExperimentRun and converts DepthFusionError into a categorized
CommandError: ``[category] message`` with exit code 2 for configuration
problems and 1 otherwise.

Cada comando resolve um RunConfig, grava ``manifest.ini``, registra um
ExperimentRun e converte DepthFusionError em CommandError categorizado.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from django.core.management.base import BaseCommand, CommandError

from depthfusion.config import MANIFEST_NAME, RunConfig, load_run_config, write_manifest
from depthfusion.exceptions import DepthFusionError
from depthfusion.harness.tracking import track_run
from depthfusion.models import ExperimentRun

logger = logging.getLogger(__name__)

# flag name -> argparse keyword arguments
CONFIG_FLAGS: dict[str, dict[str, Any]] = {
    "dataset": {"type": str, "help": "Training dataset directory / Dataset de treino"},
    "eval_dataset": {"type": str, "help": "Held-out dataset / Dataset de avaliação"},
    "output_dir": {"type": str, "help": "Output root / Diretório raiz de saída"},
    "image_size": {"type": int},
    "n_frames": {"type": int},
    "n_hypotheses": {"type": int, "help": "Depth planes D / Planos de profundidade"},
    "d_min": {"type": float},
    "d_max": {"type": float},
    "channels": {"type": int},
    "groups": {"type": int},
    "state_dim": {"type": int},
    "blocks_per_stage": {"type": int},
    "hidden": {"type": int},
    "backbone": {"type": str},
    "fusion": {"type": str},
    "lr_max": {"type": float},
    "weight_decay": {"type": float},
    "epochs": {"type": int},
    "max_steps": {"type": int},
    "batch_size": {"type": int},
    "log_every": {"type": int},
    "seed": {"type": int},
    "seeds": {"type": int, "nargs": "+"},
    "sigma_rot": {"type": float, "nargs": "+", "help": "Rotation noise (deg)"},
    "sigma_trans": {"type": float, "nargs": "+", "help": "Translation noise (x baseline)"},
    "noise_seed": {"type": int},
    "sq_rel_convention": {"type": str},
    "max_depth": {"type": float},
    "workers": {"type": int},
}


class HarnessCommand(BaseCommand):
    """
    Base class: subclasses implement ``run(config, out_dir, run, **options)``.
    Classe base: subclasses implementam ``run``.
    """

    command_name = "harness"

    def add_arguments(self, parser):
        parser.add_argument(
            "--config",
            type=str,
            default=None,
            help="Run config INI with a [settings] section / Arquivo INI de configuração",
        )
        group = parser.add_argument_group("run configuration overrides")
        for name, kwargs in CONFIG_FLAGS.items():
            group.add_argument(f"--{name.replace('_', '-')}", dest=name, default=None, **kwargs)
        group.add_argument(
            "--noise-all-poses",
            dest="noise_all_poses",
            action="store_true",
            default=None,
            help="Perturb the reference pose too / Perturba também a pose de referência",
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def default_config_path(self, options: dict[str, Any]) -> Path | None:
        return None

    def resolve_config(self, options: dict[str, Any]) -> RunConfig:
        path = options.get("config")
        config_path = Path(path) if path else self.default_config_path(options)
        if config_path is not None:
            logger.info(f"Using run config {config_path}")
        overrides = {name: options.get(name) for name in CONFIG_FLAGS}
        overrides["noise_all_poses"] = options.get("noise_all_poses")
        return load_run_config(config_path, overrides)

    def output_dir(self, config: RunConfig) -> Path:
        return Path(config.output_dir) / self.command_name

    def handle(self, *args, **options):
        try:
            config = self.resolve_config(options)
            out_dir = self.output_dir(config)
            with track_run(self.command_name, config, out_dir) as run:
                write_manifest(out_dir, config, self.command_name, seed=config.seed)
                self.run(config, out_dir, run, **options)
        except DepthFusionError as exc:
            raise CommandError(
                f"[{exc.category}] {exc}", returncode=exc.exit_code
            ) from exc
        self.stdout.write(
            self.style.SUCCESS(
                f"{self.command_name} finished, manifest {out_dir / MANIFEST_NAME} / "
                f"{self.command_name} concluído"
            )
        )

    def run(
        self,
        config: RunConfig,
        out_dir: Path,
        run: ExperimentRun | None,
        **options: Any,
    ) -> None:
        raise NotImplementedError


def checkpoint_manifest(checkpoint: str | None) -> Path | None:
    """
    The training manifest next to a checkpoint, if there is one.
    O manifesto de treino ao lado de um checkpoint, se existir.
    """
    if not checkpoint:
        return None
    path = Path(checkpoint).resolve()
    for directory in (path.parent, path.parent.parent):
        candidate = directory / MANIFEST_NAME
        if candidate.is_file():
            return candidate
    return None
