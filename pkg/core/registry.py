"""Реестр подкоманд с учётом жизненного цикла запусков."""

import argparse
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

from core.exceptions import UsageError

logger = logging.getLogger(__name__)

CommandHandler = Callable[[argparse.Namespace, Any], int]
ArgumentsAdder = Callable[[argparse.ArgumentParser], None]

class CommandLifecycle(Enum):
    """Жизненный цикл подкоманды."""
    REGISTERED = "registered"
    RUNNING = "running"
    DONE = "done"
    ERROR = "error"

@dataclass
class CommandDescriptor:
    """Дескриптор подкоманды с метаданными."""
    name: str
    handler: CommandHandler
    help: str = ""
    add_arguments: Optional[ArgumentsAdder] = None
    # dest аргумента -> ключ конфигурации в точечной записи
    overrides: Dict[str, str] = field(default_factory=dict)
    lifecycle: CommandLifecycle = CommandLifecycle.REGISTERED
    runs: int = 0
    error: Optional[Exception] = None

class CommandRegistry:
    """Реестр подкоманд: имя -> обработчик."""

    def __init__(self):
        self._commands: Dict[str, CommandDescriptor] = {}

    def register(self, name: str, handler: CommandHandler, help: str = "",
                 add_arguments: Optional[ArgumentsAdder] = None,
                 overrides: Optional[Dict[str, str]] = None) -> None:
        """Регистрирует подкоманду."""
        if not callable(handler):
            raise ValueError(f"Обработчик для {name} должен быть вызываемым")
        if name in self._commands:
            raise ValueError(f"Подкоманда уже зарегистрирована: {name}")
        self._commands[name] = CommandDescriptor(name, handler, help, add_arguments, dict(overrides or {}))
        logger.debug(f"✅ Зарегистрирована подкоманда: {name}")

    def has(self, name: str) -> bool:
        return name in self._commands

    def get(self, name: str) -> CommandDescriptor:
        if name not in self._commands:
            known = ", ".join(self.names())
            raise UsageError(f"Неизвестная подкоманда '{name}' (доступны: {known})")
        return self._commands[name]

    def names(self) -> List[str]:
        return list(self._commands)

    def descriptors(self) -> List[CommandDescriptor]:
        return list(self._commands.values())

    def run(self, name: str, args: argparse.Namespace, config: Any) -> int:
        """Запускает подкоманду и отслеживает её состояние."""
        descriptor = self.get(name)
        descriptor.lifecycle = CommandLifecycle.RUNNING
        descriptor.runs += 1
        try:
            code = descriptor.handler(args, config)
        except Exception as e:
            descriptor.lifecycle = CommandLifecycle.ERROR
            descriptor.error = e
            raise
        descriptor.lifecycle = CommandLifecycle.DONE
        descriptor.error = None
        return int(code or 0)

    def get_registry_status(self) -> Dict[str, Any]:
        """Статус реестра."""
        status = {
            "total_commands": len(self._commands),
            "commands": {},
        }
        for name, descriptor in self._commands.items():
            status["commands"][name] = {
                "lifecycle": descriptor.lifecycle.value,
                "runs": descriptor.runs,
                "error": str(descriptor.error) if descriptor.error else None,
            }
        return status
