"""
URL configuration: the admin is the only web surface.
Configuração de URLs: o admin é a única interface web.
"""

from django.contrib import admin
from django.urls import path

urlpatterns = [
    path("admin/", admin.site.urls),
]
