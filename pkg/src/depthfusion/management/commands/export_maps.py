"""
Management command: export predicted depth and confidence maps.
Comando de gerenciamento: exporta mapas de profundidade e confiança.

Usage / Uso:
    python manage.py export_maps --checkpoint runs/train/model.ckpt --eval-dataset data/heldout
"""

from depthfusion.checkpoint import load_checkpoint
from depthfusion.harness.export import export_maps
from depthfusion.management.base import HarnessCommand, checkpoint_manifest
from depthfusion.scenes.dataset import load_dataset


class Command(HarnessCommand):
    help = "Export depth/confidence PFM and PGM previews / Exporta mapas PFM e PGM"
    command_name = "export_maps"

    def add_command_arguments(self, parser):
        parser.add_argument("--checkpoint", type=str, required=True)

    def default_config_path(self, options):
        return checkpoint_manifest(options.get("checkpoint"))

    def run(self, config, out_dir, run, **options):
        model, _ = load_checkpoint(options["checkpoint"], expected=config.model_config())
        samples = load_dataset(config.eval_dataset_path)
        written = export_maps(model, samples, out_dir)
        self.stdout.write(f"{len(written)} files written to {out_dir}")
