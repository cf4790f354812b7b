"""
Management command: fusion or backbone ablation.
Comando de gerenciamento: ablação de fusão ou de backbone.

Usage / Uso:
    python manage.py ablate --axis fusion --dataset data/desk --eval-dataset data/heldout
"""

from depthfusion.harness.ablation import (
    ABLATION_AXES,
    ablate,
    format_ablation_table,
    write_ablation_table,
)
from depthfusion.harness.tracking import record_metrics
from depthfusion.management.base import HarnessCommand


class Command(HarnessCommand):
    help = "Compare architecture variants / Compara variantes da arquitetura"
    command_name = "ablate"

    def add_command_arguments(self, parser):
        parser.add_argument("--axis", choices=sorted(ABLATION_AXES), required=True)

    def run(self, config, out_dir, run, **options):
        axis = options["axis"]

        def on_report(variant, seed, report):
            record_metrics(run, report, label=variant, seed=seed)

        results = ablate(config, axis, out_dir, on_report=on_report)
        table = write_ablation_table(out_dir / f"ablation_{axis}.csv", results)
        self.stdout.write(format_ablation_table(results))
        self.stdout.write(f"table: {table}")
