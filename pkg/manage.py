#!/usr/bin/env python
"""Django's command-line utility; runs the depthfusion harness commands."""

import os
import sys
from pathlib import Path


def main():
    """Run administrative and harness tasks / Executa tarefas do harness."""
    # src/ layout: make the project importable without installing it
    # layout src/: torna o projeto importável sem instalação
    sys.path.insert(0, str(Path(__file__).resolve().parent / "src"))
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "depthbench.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
