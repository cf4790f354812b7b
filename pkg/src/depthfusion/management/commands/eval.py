"""
Management command: evaluate a checkpoint at one pose-noise level.
Comando de gerenciamento: avalia um checkpoint em um nível de ruído de pose.

Without ``--config`` the training manifest next to the checkpoint is used.

Usage / Uso:
    python manage.py eval --checkpoint runs/train/model.ckpt --noise 1.0 0.05
"""

from depthfusion.harness.evaluation import evaluate_checkpoint
from depthfusion.harness.tracking import record_metrics
from depthfusion.management.base import HarnessCommand, checkpoint_manifest

REPORT_NAME = "eval_report.json"


class Command(HarnessCommand):
    help = "Evaluate a checkpoint / Avalia um checkpoint"
    command_name = "eval"

    def add_command_arguments(self, parser):
        parser.add_argument("--checkpoint", type=str, required=True)
        parser.add_argument(
            "--noise",
            type=float,
            nargs=2,
            default=(0.0, 0.0),
            metavar=("SIGMA_ROT", "SIGMA_TRANS"),
            help="Rotation (deg) and translation (x baseline) noise / Ruído de pose",
        )

    def default_config_path(self, options):
        return checkpoint_manifest(options.get("checkpoint"))

    def run(self, config, out_dir, run, **options):
        sigma_rot, sigma_trans = options["noise"]
        report = evaluate_checkpoint(options["checkpoint"], config, sigma_rot, sigma_trans)
        (out_dir / REPORT_NAME).write_text(report.to_json(), encoding="utf-8")
        record_metrics(
            run,
            report,
            label=config.fusion,
            seed=config.noise_seed,
            sigma_rot=sigma_rot,
            sigma_trans=sigma_trans,
        )
        self.stdout.write(
            f"AbsRel {report.abs_rel:.4f}  SqRel {report.sq_rel:.4f}  "
            f"RMSE {report.rmse:.4f}  d1 {report.delta1:.4f}  "
            f"d2 {report.delta2:.4f}  d3 {report.delta3:.4f}  ({report.n_pixels} px)"
        )
