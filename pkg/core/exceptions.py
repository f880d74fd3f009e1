"""Иерархия исключений приложения и коды выхода CLI."""

from typing import Optional


class RetinaError(Exception):
    """Базовое исключение приложения."""
    exit_code: int = 2


class UsageError(RetinaError):
    """Неверное использование: неизвестная команда, плохие флаги."""
    exit_code = 1


class ConfigError(UsageError, ValueError):
    """Некорректная конфигурация эксперимента."""


class DataError(RetinaError, ValueError):
    """Ошибка во входных данных."""
    exit_code = 2


class ShapeMismatchError(DataError):
    """Несовпадение формы тензора на слое сети."""

    def __init__(self, message: str, layer_index: Optional[int] = None):
        if layer_index is not None:
            message = f"слой {layer_index}: {message}"
        super().__init__(message)
        self.layer_index = layer_index


class TrainingDivergedError(DataError):
    """Обучение разошлось (нечисловое значение функции потерь)."""

    def __init__(self, iteration: int, loss: float):
        super().__init__(f"loss={loss} на итерации {iteration}")
        self.iteration = iteration
        self.loss = loss


class MappingInfeasibleError(RetinaError):
    """Нет допустимого размещения слоёв по ядрам."""
    exit_code = 3

    def __init__(self, layers: list[int]):
        super().__init__(f"неразмещаемые слои: {layers}")
        self.layers = layers
