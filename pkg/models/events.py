"""Модели событий DVS и меток зрачка."""

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Iterator, List, Sequence

import numpy as np

from core.exceptions import DataError

class Polarity(IntEnum):
    """Полярность события."""
    OFF = 0
    ON = 1

@dataclass(frozen=True)
class Event:
    """Одно событие сенсора."""
    t: int
    x: int
    y: int
    polarity: Polarity

@dataclass(frozen=True)
class PupilLabel:
    """Метка центра зрачка в координатах потока."""
    t: int
    x: float
    y: float

def _frozen(array: np.ndarray, dtype) -> np.ndarray:
    out = np.ascontiguousarray(array, dtype=dtype)
    if out is array:
        out = out.copy()
    out.setflags(write=False)
    return out

@dataclass(frozen=True, eq=False)
class EventStream:
    """Поток событий, отсортированный по времени.

    Хранится столбцами numpy; после создания массивы только для чтения.
    """
    width: int
    height: int
    t: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    x: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int32))
    y: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int32))
    p: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.uint8))

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise DataError(f"Некорректное разрешение {self.width}x{self.height}")

        t = np.asarray(self.t)
        x = np.asarray(self.x)
        y = np.asarray(self.y)
        p = np.asarray(self.p)
        n = len(t)
        if not (len(x) == len(y) == len(p) == n):
            raise DataError("Столбцы событий разной длины")

        if n:
            if t.min() < 0:
                raise DataError("Отрицательная метка времени")
            if x.min() < 0 or x.max() >= self.width:
                raise DataError(f"x вне диапазона [0, {self.width})")
            if y.min() < 0 or y.max() >= self.height:
                raise DataError(f"y вне диапазона [0, {self.height})")
            if not np.isin(p, (0, 1)).all():
                raise DataError("Полярность вне {0, 1}")
            if np.any(np.diff(t) < 0):
                raise DataError("События не отсортированы по времени")

        object.__setattr__(self, "t", _frozen(t, np.int64))
        object.__setattr__(self, "x", _frozen(x, np.int32))
        object.__setattr__(self, "y", _frozen(y, np.int32))
        object.__setattr__(self, "p", _frozen(p, np.uint8))

    @classmethod
    def from_events(cls, width: int, height: int, events: Iterable[Event]) -> "EventStream":
        """Строит поток из списка событий (порядок должен быть по времени)."""
        events = list(events)
        return cls(
            width=width,
            height=height,
            t=np.array([e.t for e in events], dtype=np.int64),
            x=np.array([e.x for e in events], dtype=np.int32),
            y=np.array([e.y for e in events], dtype=np.int32),
            p=np.array([int(e.polarity) for e in events], dtype=np.uint8),
        )

    def __len__(self) -> int:
        return len(self.t)

    def __iter__(self) -> Iterator[Event]:
        for t, x, y, p in zip(self.t, self.x, self.y, self.p):
            yield Event(int(t), int(x), int(y), Polarity(int(p)))

    @property
    def events(self) -> List[Event]:
        """События в виде списка объектов."""
        return list(self)

    @property
    def resolution(self) -> tuple:
        return (self.width, self.height)

    def select(self, mask: np.ndarray) -> "EventStream":
        """Подмножество событий по булевой маске (порядок сохраняется)."""
        return EventStream(self.width, self.height,
                           self.t[mask], self.x[mask], self.y[mask], self.p[mask])

    def same_as(self, other: "EventStream") -> bool:
        """Поэлементное сравнение двух потоков."""
        return (self.width == other.width and self.height == other.height
                and np.array_equal(self.t, other.t) and np.array_equal(self.x, other.x)
                and np.array_equal(self.y, other.y) and np.array_equal(self.p, other.p))

@dataclass(frozen=True)
class Recording:
    """Запись: поток событий и метки зрачка."""
    stream: EventStream
    labels: Sequence[PupilLabel]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        for a, b in zip(labels, labels[1:]):
            if b.t <= a.t:
                raise DataError(f"Метки не строго возрастают по времени: {a.t} -> {b.t}")
        for label in labels:
            if not (0 <= label.x < self.stream.width and 0 <= label.y < self.stream.height):
                raise DataError(f"Метка ({label.x}, {label.y}) вне кадра "
                                f"{self.stream.width}x{self.stream.height}")

    @property
    def label_times(self) -> np.ndarray:
        return np.array([label.t for label in self.labels], dtype=np.int64)

    @property
    def label_xy(self) -> np.ndarray:
        return np.array([[label.x, label.y] for label in self.labels], dtype=np.float64).reshape(-1, 2)
