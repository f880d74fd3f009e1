"""Модели нарезки событий: конфигурация и последовательность кадров."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.exceptions import DataError

FIXED = "fixed"
DYNAMIC = "dynamic"

@dataclass(frozen=True)
class SliceConfig:
    """Режим нарезки: фиксированное окно dt или динамическое по N уникальным пикселям."""
    mode: str
    dt_us: Optional[int] = None
    n_events: Optional[int] = None
    num_bins: int = 64
    height: int = 64
    width: int = 64

    def __post_init__(self):
        if self.mode == FIXED:
            if self.dt_us is None or self.dt_us <= 0:
                raise DataError(f"dt должен быть > 0, получено {self.dt_us}")
        elif self.mode == DYNAMIC:
            if self.n_events is None or self.n_events < 1:
                raise DataError(f"N должно быть >= 1, получено {self.n_events}")
        else:
            raise DataError(f"Неизвестный режим нарезки: {self.mode}")
        if self.num_bins < 1:
            raise DataError(f"num_bins должен быть >= 1, получено {self.num_bins}")
        if self.height < 1 or self.width < 1:
            raise DataError(f"Некорректный размер кадра {self.width}x{self.height}")

    @classmethod
    def fixed(cls, dt_us: int, num_bins: int = 64, height: int = 64, width: int = 64) -> "SliceConfig":
        return cls(FIXED, dt_us=dt_us, num_bins=num_bins, height=height, width=width)

    @classmethod
    def dynamic(cls, n_events: int, num_bins: int = 64, height: int = 64, width: int = 64) -> "SliceConfig":
        return cls(DYNAMIC, n_events=n_events, num_bins=num_bins, height=height, width=width)

@dataclass(eq=False)
class EventFrameSequence:
    """Бинарный тензор (T, 2, H, W), времена концов бинов и интерполированные метки.

    Канал 0 = OFF, канал 1 = ON; индексация кадра [y, x].
    """
    frames: np.ndarray
    bin_end_times: np.ndarray
    labels: np.ndarray
    padded_bins: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.uint8)
        self.bin_end_times = np.asarray(self.bin_end_times, dtype=np.int64)
        self.labels = np.asarray(self.labels, dtype=np.float64).reshape(-1, 2)

        if self.frames.ndim != 4 or self.frames.shape[1] != 2:
            raise DataError(f"Ожидается тензор (T, 2, H, W), получено {self.frames.shape}")
        num_bins = self.frames.shape[0]
        if len(self.bin_end_times) != num_bins or len(self.labels) != num_bins:
            raise DataError("Число времён/меток не совпадает с числом бинов")
        if np.any(np.diff(self.bin_end_times) <= 0):
            raise DataError("Времена концов бинов должны строго возрастать")

    @property
    def num_bins(self) -> int:
        return self.frames.shape[0]

    @property
    def shape(self) -> tuple:
        return tuple(self.frames.shape)

    def active_pixels(self) -> np.ndarray:
        """Число активных пикселей (любой канал) в каждом бине."""
        return (self.frames.max(axis=1) > 0).reshape(self.num_bins, -1).sum(axis=1)

    def tail(self, length: int) -> "EventFrameSequence":
        """Последние length бинов последовательности."""
        if length >= self.num_bins:
            return self
        start = self.num_bins - length
        padded = max(0, self.padded_bins - start)
        return EventFrameSequence(self.frames[start:], self.bin_end_times[start:],
                                  self.labels[start:], padded, dict(self.metadata))
