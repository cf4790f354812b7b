"""
Production Settings - Depth Fusion Bench

For long unattended runs (ablations, full noise grids) on a shared machine:

- DEBUG disabled, SECRET_KEY required
- rotating log file under ``logs/`` next to the console handler
- Sentry error reporting when SENTRY_DSN is set

---

Configurações de Produção - Depth Fusion Bench

Para execuções longas sem supervisão: DEBUG desligado, arquivo de log com
rotação em ``logs/`` e Sentry quando SENTRY_DSN estiver definido.

Usage / Uso:
export DJANGO_SETTINGS_MODULE=depthbench.settings.prod
"""

import sentry_sdk
from sentry_sdk.integrations.django import DjangoIntegration

from .base import *  # noqa: F403

DEBUG = False

SECRET_KEY = config("SECRET_KEY")  # noqa: F405

SESSION_COOKIE_SECURE = True
CSRF_COOKIE_SECURE = True

# Logging with file rotation / Logging com rotação de arquivos

LOG_DIR = BASE_DIR / "logs"  # noqa: F405
LOG_DIR.mkdir(exist_ok=True)

LOGGING["handlers"]["file"] = {  # noqa: F405
    "class": "logging.handlers.RotatingFileHandler",
    "filename": LOG_DIR / "depthbench.log",
    "maxBytes": 1024 * 1024 * 10,  # 10 MB
    "backupCount": 5,
    "formatter": "verbose",
}
for logger_name in ("django", "depthfusion"):
    LOGGING["loggers"][logger_name]["handlers"] = ["console", "file"]  # noqa: F405

# Sentry Error Tracking / Rastreamento de Erros Sentry

SENTRY_DSN = config("SENTRY_DSN", default=None)  # noqa: F405

if SENTRY_DSN:
    sentry_sdk.init(
        dsn=SENTRY_DSN,
        integrations=[DjangoIntegration()],
        traces_sample_rate=config(  # noqa: F405
            "SENTRY_TRACES_SAMPLE_RATE", default=0.0, cast=float
        ),
        send_default_pii=False,
        environment=config("ENVIRONMENT", default="production"),  # noqa: F405
        release=config("SENTRY_RELEASE", default=None),  # noqa: F405
    )
