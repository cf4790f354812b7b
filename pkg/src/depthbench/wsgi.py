"""
WSGI config for depthbench (serves the tracking admin).
Configuração WSGI para depthbench.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "depthbench.settings")

application = get_wsgi_application()
