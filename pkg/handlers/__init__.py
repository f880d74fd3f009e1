# handlers/__init__.py
"""Пакет обработчиков подкоманд."""

from .base_handler import BaseCommandHandler
from .command_handlers import CommandHandlers

__all__ = [
    "BaseCommandHandler",
    "CommandHandlers",
]
