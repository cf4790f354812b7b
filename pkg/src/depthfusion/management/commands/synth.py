"""
Management command: generate a synthetic multi-view dataset.
Comando de gerenciamento: gera um dataset sintético multi-vista.

Usage / Uso:
    python manage.py synth --n-scenes 50 --dataset data/desk
    python manage.py synth --n-scenes 10 --dataset data/heldout --seed 1000
"""

from dataclasses import replace
from pathlib import Path

from depthfusion.management.base import HarnessCommand
from depthfusion.scenes.dataset import make_dataset


class Command(HarnessCommand):
    help = "Generate a synthetic dataset / Gera um dataset sintético"
    command_name = "synth"

    def add_command_arguments(self, parser):
        parser.add_argument(
            "--n-scenes",
            type=int,
            default=50,
            help="Number of scenes (default: 50) / Número de cenas (padrão: 50)",
        )
        parser.add_argument("--texture-level", type=float, default=None)
        parser.add_argument("--dynamic-probability", type=float, default=None)
        parser.add_argument(
            "--fronto-parallel-depth",
            type=float,
            default=None,
            help="Single textured wall at this depth / Parede única nesta profundidade",
        )

    def run(self, config, out_dir, run, **options):
        scene_config = config.scene_config()
        changes = {
            key: options[key]
            for key in ("texture_level", "dynamic_probability", "fronto_parallel_depth")
            if options.get(key) is not None
        }
        if changes:
            scene_config = replace(scene_config, **changes)
        root = make_dataset(
            scene_config, options["n_scenes"], Path(config.dataset), workers=config.workers
        )
        self.stdout.write(
            f"Wrote {options['n_scenes']} scenes to {root} / "
            f"{options['n_scenes']} cenas gravadas em {root}"
        )
