"""
Management command: validate a run config file.
Comando de gerenciamento: valida um arquivo de configuração.

Prints one line per field diagnostic; exits with code 2 when any exist.

Usage / Uso:
    python manage.py validate_config runs/train/manifest.ini
"""

from django.core.management.base import BaseCommand, CommandError

from depthfusion.config import check_config_file
from depthfusion.exceptions import ConfigurationError


class Command(BaseCommand):
    help = "Validate a run config file / Valida um arquivo de configuração"

    def add_arguments(self, parser):
        parser.add_argument("path", type=str, help="INI file with a [settings] section")

    def handle(self, *args, **options):
        try:
            problems = check_config_file(options["path"])
        except ConfigurationError as exc:
            problems = exc.problems
        if not problems:
            self.stdout.write(self.style.SUCCESS(f"{options['path']}: OK / válido"))
            return
        for key, messages in problems.items():
            for message in messages:
                self.stdout.write(self.style.ERROR(f"{key}: {message}"))
        count = sum(len(m) for m in problems.values())
        raise CommandError(
            f"[{ConfigurationError.category}] {count} problem(s) in {options['path']}",
            returncode=ConfigurationError.exit_code,
        )
