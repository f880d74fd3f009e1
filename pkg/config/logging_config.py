"""Конфигурация логирования."""

import logging
import logging.handlers
import sys
from pathlib import Path

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - [%(command)s] %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

class CommandContextFilter(logging.Filter):
    """Добавляет в запись имя подкоманды (передаётся через extra={"command": ...})."""

    def __init__(self, command: str = "-"):
        super().__init__()
        self.command = command

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "command"):
            record.command = self.command
        return True

def _rotating(path: Path, max_bytes: int, backups: int) -> logging.Handler:
    return logging.handlers.RotatingFileHandler(path, maxBytes=max_bytes, backupCount=backups, encoding="utf-8")

def setup_logging(level: str = "INFO", debug: bool = False, log_dir: str = "logs",
                  command: str = "-") -> None:
    """Консоль (stderr) + logs/retina.log + logs/error.log.

    stdout остаётся за отчётами подкоманд. Повторный вызов заменяет обработчики.
    """
    log_path = Path(log_dir)
    log_path.mkdir(parents=True, exist_ok=True)

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)
    context = CommandContextFilter(command)

    handlers = [
        logging.StreamHandler(sys.stderr),
        _rotating(log_path / "retina.log", 10 * 1024 * 1024, 5),  # 10MB
        _rotating(log_path / "error.log", 5 * 1024 * 1024, 3),  # 5MB, только ошибки
    ]
    handlers[2].setLevel(logging.ERROR)

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG if debug else getattr(logging, level.upper(), logging.INFO))
    for handler in list(root_logger.handlers):
        root_logger.removeHandler(handler)
        handler.close()
    for handler in handlers:
        handler.setFormatter(formatter)
        handler.addFilter(context)
        root_logger.addHandler(handler)

    # Уменьшаем вербозность внешних библиотек
    if not debug:
        logging.getLogger("torch").setLevel(logging.WARNING)

    logging.getLogger(__name__).debug(f"📋 Логирование настроено: уровень {level}, каталог {log_path}")
