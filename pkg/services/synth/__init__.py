"""Пакет синтетических данных."""

from .generator import generate, Trajectory

__all__ = ["generate", "Trajectory"]
