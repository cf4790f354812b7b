"""
Management command: train a depth model.
Comando de gerenciamento: treina um modelo de profundidade.

Usage / Uso:
    python manage.py train --dataset data/desk --max-steps 500
    python manage.py train --config runs/train/manifest.ini
"""

from depthfusion.harness.training import train
from depthfusion.management.base import HarnessCommand


class Command(HarnessCommand):
    help = "Train a depth model / Treina um modelo de profundidade"
    command_name = "train"

    def run(self, config, out_dir, run, **options):
        result = train(config, out_dir)
        first, last = result.losses[0], result.losses[-1]
        self.stdout.write(
            f"{result.steps} steps, loss {first:.4f} -> {last:.4f}\n"
            f"checkpoint: {result.checkpoint}\n"
            f"loss log: {result.loss_log}"
        )
