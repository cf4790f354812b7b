# Settings Package Initialization
# Inicialização do Pacote Settings

# Picks the settings module from DJANGO_SETTINGS_MODULE.
# Escolhe o módulo de settings a partir de DJANGO_SETTINGS_MODULE.
#
# Usage / Uso:
# - Development: DJANGO_SETTINGS_MODULE=depthbench.settings.dev
# - Production: DJANGO_SETTINGS_MODULE=depthbench.settings.prod
# - Default: DJANGO_SETTINGS_MODULE=depthbench.settings (uses base)

import os

settings_module = os.environ.get("DJANGO_SETTINGS_MODULE", "depthbench.settings.base")

if "dev" in settings_module:
    from .dev import *  # noqa: F403
elif "prod" in settings_module:
    from .prod import *  # noqa: F403
else:
    from .base import *  # noqa: F403
