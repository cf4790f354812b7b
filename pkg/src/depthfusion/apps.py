from django.apps import AppConfig


class DepthFusionConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "depthfusion"
    verbose_name = "Depth Fusion"
