"""
Development Settings - Depth Fusion Bench

DEBUG on, every host allowed, DEBUG-level harness logging.

Configurações de Desenvolvimento - DEBUG ligado e logging detalhado.

Usage / Uso:
export DJANGO_SETTINGS_MODULE=depthbench.settings.dev
"""

from .base import *  # noqa: F403

DEBUG = True

ALLOWED_HOSTS = ["*"]

# Verbose harness logs; step losses and per-scene timings show up here.
# Logs detalhados do harness.
LOGGING["loggers"]["depthfusion"]["level"] = config(  # noqa: F405
    "LOG_LEVEL", default="DEBUG"
)

DEBUG_PROPAGATE_EXCEPTIONS = True
