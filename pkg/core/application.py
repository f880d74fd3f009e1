"""Главный класс приложения: разбор команд, конфигурация, запуск подкоманд."""

import argparse
import logging
import platform
from typing import Any, Dict, Optional, Sequence

import numpy as np
import torch

from config.logging_config import setup_logging
from config.settings import ExperimentConfig, load_config
from core.exceptions import DataError, RetinaError, UsageError
from core.registry import CommandDescriptor, CommandRegistry
from handlers.command_handlers import CommandHandlers

logger = logging.getLogger(__name__)

# Общие флаги всех подкоманд: dest -> ключи конфигурации
COMMON_OVERRIDES = {
    "seed": ("seed", "synth.rng_seed"),
    "jobs": ("jobs",),
    "log_level": ("log_level",),
    "debug": ("debug",),
    "output_dir": ("paths.output_dir",),
}

class ArgumentParser(argparse.ArgumentParser):
    """Парсер, сообщающий об ошибках исключением, а не выходом с кодом 2."""

    def error(self, message: str):
        raise UsageError(message)

class RetinaApplication:
    """Приложение конвейера отслеживания зрачка."""

    def __init__(self, handlers: Optional[CommandHandlers] = None):
        self.handlers = handlers or CommandHandlers()
        self.registry = CommandRegistry()
        self._register_commands()
        self.parser = self.build_parser()
        self.config: Optional[ExperimentConfig] = None

    def _register_commands(self) -> None:
        for command in self.handlers.commands():
            self.registry.register(**command)
        logger.debug(f"📝 Зарегистрировано подкоманд: {len(self.registry.names())}")

    def build_parser(self) -> argparse.ArgumentParser:
        """Парсер со всеми подкомандами реестра."""
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--config", help="YAML-файл эксперимента")
        common.add_argument("--seed", type=int, help="единый seed всей случайности")
        common.add_argument("--jobs", type=int, help="параллельных потоков нарезки")
        common.add_argument("--log-level", help="уровень логирования (DEBUG, INFO, ...)")
        common.add_argument("--debug", action="store_const", const=True, help="режим отладки")
        common.add_argument("--output-dir", help="каталог артефактов")

        parser = ArgumentParser(prog="retina", description="Отслеживание зрачка по событиям DVS")
        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=ArgumentParser)
        for descriptor in self.registry.descriptors():
            sub = subparsers.add_parser(descriptor.name, help=descriptor.help,
                                        description=descriptor.help, parents=[common])
            if descriptor.add_arguments:
                descriptor.add_arguments(sub)
        return parser

    def _collect_overrides(self, args: argparse.Namespace, descriptor: CommandDescriptor) -> Dict[str, Any]:
        """Флаги командной строки в виде точечных ключей конфигурации."""
        overrides: Dict[str, Any] = {}
        for dest, keys in COMMON_OVERRIDES.items():
            value = getattr(args, dest, None)
            if value is not None:
                for key in keys:
                    overrides[key] = value
        for dest, key in descriptor.overrides.items():
            value = getattr(args, dest, None)
            if value is not None:
                overrides[key] = value
        return overrides

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """Запускает подкоманду и возвращает код выхода."""
        debug = False
        try:
            args = self.parser.parse_args(list(argv) if argv is not None else None)
            if not args.command:
                raise UsageError(f"Не указана подкоманда (доступны: {', '.join(self.registry.names())})")
            debug = bool(args.debug)

            descriptor = self.registry.get(args.command)
            self.config = load_config(args.config, self._collect_overrides(args, descriptor))
            debug = self.config.debug
            setup_logging(self.config.log_level, self.config.debug, self.config.log_dir, args.command)
            self._log_application_status(args.command)

            torch.manual_seed(self.config.seed)
            np.random.seed(self.config.seed)
            return self.registry.run(args.command, args, self.config)

        except RetinaError as e:
            logger.error(f"❌ {type(e).__name__}: {e}", exc_info=debug)
            return e.exit_code
        except OSError as e:
            logger.error(f"❌ Ошибка ввода-вывода: {e}", exc_info=debug)
            return DataError.exit_code
        finally:
            self._cleanup()

    def _log_application_status(self, command: str) -> None:
        config = self.config
        logger.info(f"🚀 Подкоманда {command}")
        logger.debug(f"🖥️ Платформа: {platform.system()}, Python {platform.python_version()}, "
                     f"torch {torch.__version__}")
        logger.debug(f"🔧 seed={config.seed}, jobs={config.jobs}, вывод в {config.paths.output_dir}")

    def _cleanup(self) -> None:
        status = self.registry.get_registry_status()
        failed = [name for name, s in status["commands"].items() if s["error"]]
        if failed:
            logger.debug(f"📊 Подкоманды с ошибкой: {failed}")