"""
Management command: pose-noise robustness benchmark.
Comando de gerenciamento: benchmark de robustez a ruído de pose.

Usage / Uso:
    python manage.py bench_noise --checkpoint runs/train/model.ckpt
    python manage.py bench_noise --checkpoint runs/train/model.ckpt \
        --sigma-rot 0 1 2 --sigma-trans 0 0.05
"""

from depthfusion.checkpoint import load_checkpoint
from depthfusion.harness.benchmark import bench_noise, write_noise_json, write_noise_table
from depthfusion.harness.tracking import record_metrics
from depthfusion.management.base import HarnessCommand, checkpoint_manifest
from depthfusion.scenes.dataset import load_dataset


class Command(HarnessCommand):
    help = "Run the pose-noise benchmark grid / Executa a grade de ruído de pose"
    command_name = "bench_noise"

    def add_command_arguments(self, parser):
        parser.add_argument("--checkpoint", type=str, required=True)

    def default_config_path(self, options):
        return checkpoint_manifest(options.get("checkpoint"))

    def run(self, config, out_dir, run, **options):
        model, _ = load_checkpoint(options["checkpoint"], expected=config.model_config())
        samples = load_dataset(config.eval_dataset_path)
        _, cells = bench_noise(model, samples, config)
        table = write_noise_table(out_dir / "noise_table.csv", cells)
        write_noise_json(out_dir / "noise_table.json", cells)
        for cell in cells:
            record_metrics(
                run,
                cell.report,
                label=config.fusion,
                seed=config.noise_seed,
                sigma_rot=cell.sigma_rot,
                sigma_trans=cell.sigma_trans,
            )
        self.stdout.write(f"{len(cells)} grid cells written to {table}")
