"""
Base Settings - Depth Fusion Bench

Settings shared by every environment. The experiment tracker (ExperimentRun,
MetricsRecord) lives in a local SQLite file; the admin is the only web surface.

Harness defaults come from ``DEPTH_FUSION_*`` environment variables (or
``.env``). Only variables that are set end up in ``DEPTH_FUSION``; the
rest fall back to the RunConfig defaults.

---

Configurações Base - Depth Fusion Bench

Configurações compartilhadas entre ambientes. O rastreador de experimentos
usa um arquivo SQLite local; o admin é a única interface web.

Os padrões do harness vêm de variáveis ``DEPTH_FUSION_*`` (ou ``.env``).
"""

from pathlib import Path

from decouple import Csv, config

# Core Settings / Configurações Core

BASE_DIR = Path(__file__).resolve().parent.parent.parent.parent

# Development fallback only; set SECRET_KEY in production.
# Apenas para desenvolvimento; defina SECRET_KEY em produção.
SECRET_KEY = config("SECRET_KEY", default="depthbench-insecure-dev-key")

DEBUG = config("DEBUG", default=False, cast=bool)

ALLOWED_HOSTS = config("ALLOWED_HOSTS", cast=Csv(), default="localhost,127.0.0.1")

# Application Definition / Definição de Aplicação

INSTALLED_APPS = [
    "django.contrib.admin",
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "django.contrib.sessions",
    "django.contrib.messages",
    "django.contrib.staticfiles",
    # Local apps / Apps locais
    "depthfusion",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.contrib.sessions.middleware.SessionMiddleware",
    "django.middleware.common.CommonMiddleware",
    "django.middleware.csrf.CsrfViewMiddleware",
    "django.contrib.auth.middleware.AuthenticationMiddleware",
    "django.contrib.messages.middleware.MessageMiddleware",
    "django.middleware.clickjacking.XFrameOptionsMiddleware",
]

ROOT_URLCONF = "depthbench.urls"

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.debug",
                "django.template.context_processors.request",
                "django.contrib.auth.context_processors.auth",
                "django.contrib.messages.context_processors.messages",
            ],
        },
    },
]

WSGI_APPLICATION = "depthbench.wsgi.application"

# Database Configuration / Configuração de Banco de Dados
# Experiment tracking only; losing it never affects a run.
# Apenas rastreamento de experimentos.

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": config("DATABASE_PATH", default=str(BASE_DIR / "depthbench.sqlite3")),
    }
}

# Internationalization / Internacionalização

LANGUAGE_CODE = config("LANGUAGE_CODE", default="en")
TIME_ZONE = config("TIME_ZONE", default="UTC")
USE_I18N = True
USE_TZ = True

STATIC_URL = "/static/"
STATIC_ROOT = BASE_DIR / "staticfiles"

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Harness Defaults / Padrões do Harness
# DEPTH_FUSION_<FIELD> overrides a RunConfig default, e.g. DEPTH_FUSION_SEED=3,
# DEPTH_FUSION_SIGMA_ROT=0,0.5,1. Values are cast by depthfusion.config.
# DEPTH_FUSION_<CAMPO> sobrescreve um padrão do RunConfig.

DEPTH_FUSION_FIELDS = (
    "dataset",
    "eval_dataset",
    "image_size",
    "image_channels",
    "n_frames",
    "n_hypotheses",
    "d_min",
    "d_max",
    "channels",
    "groups",
    "state_dim",
    "blocks_per_stage",
    "hidden",
    "backbone",
    "fusion",
    "lr_max",
    "weight_decay",
    "epochs",
    "max_steps",
    "batch_size",
    "log_every",
    "seed",
    "seeds",
    "sigma_rot",
    "sigma_trans",
    "noise_seed",
    "noise_all_poses",
    "sq_rel_convention",
    "max_depth",
    "output_dir",
    "workers",
)

DEPTH_FUSION = {
    name: value
    for name in DEPTH_FUSION_FIELDS
    if (value := config(f"DEPTH_FUSION_{name.upper()}", default=None)) is not None
}

# Slow acceptance tests run only with RUN_SLOW_TESTS=true.
# Testes de aceitação lentos rodam apenas com RUN_SLOW_TESTS=true.
TEST_RUNNER = "depthbench.test_runner.DepthBenchTestRunner"

# Logging Configuration / Configuração de Logging

LOG_LEVEL = config("LOG_LEVEL", default="INFO")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": "WARNING",
            "propagate": False,
        },
        "depthfusion": {
            "handlers": ["console"],
            "level": LOG_LEVEL,
            "propagate": False,
        },
    },
}
