"""
``depthbench`` console script.
Script de console ``depthbench``.

Usage / Uso:
    depthbench synth --n-scenes 50 --dataset data/desk
    depthbench train --dataset data/desk
    depthbench bench-noise --checkpoint runs/train/model.ckpt
    depthbench validate-config runs/train/manifest.ini

Subcommands are the depthfusion management commands with hyphens allowed.
Any other name (migrate, test, ...) is passed to Django unchanged.
"""

import os
import sys

from django.core.management import execute_from_command_line

HARNESS_COMMANDS = (
    "synth",
    "train",
    "eval",
    "bench_noise",
    "ablate",
    "export_maps",
    "validate_config",
)


def normalize_argv(argv: list[str]) -> list[str]:
    if len(argv) < 2:
        return argv
    name = argv[1].replace("-", "_")
    if name in HARNESS_COMMANDS:
        return [argv[0], name, *argv[2:]]
    return argv


def main(argv: list[str] | None = None) -> None:
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "depthbench.settings")
    execute_from_command_line(normalize_argv(list(sys.argv if argv is None else argv)))


if __name__ == "__main__":
    main()
