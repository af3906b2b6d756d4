from django.apps import AppConfig


class AdjustmentConfig(AppConfig):
    name = 'adjustment'
