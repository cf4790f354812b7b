"""
Test runner that skips ``slow``-tagged acceptance tests by default.
Runner de testes que ignora testes marcados como ``slow`` por padrão.

RUN_SLOW_TESTS=true python manage.py test depthfusion
"""

from decouple import config
from django.test.runner import DiscoverRunner


class DepthBenchTestRunner(DiscoverRunner):
    def __init__(self, *args, exclude_tags=None, **kwargs):
        exclude_tags = set(exclude_tags or ())
        if not config("RUN_SLOW_TESTS", default=False, cast=bool):
            exclude_tags.add("slow")
        super().__init__(*args, exclude_tags=exclude_tags, **kwargs)
