# config/__init__.py
"""Пакет конфигурации."""

from .settings import load_config, ExperimentConfig

__all__ = ["load_config", "ExperimentConfig"]
