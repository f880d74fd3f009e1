"""Статистика времён дискретизации и числа событий на метку времени."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.exceptions import DataError
from models.events import EventStream

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class SummaryStats:
    """Медиана, среднее, СКО, минимум, максимум."""
    median: float
    mean: float
    std: float
    min: float
    max: float

    @classmethod
    def of(cls, values: np.ndarray) -> "SummaryStats":
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0:
            nan = math.nan
            return cls(nan, nan, nan, nan, nan)
        return cls(
            median=float(np.median(values)),
            mean=float(np.mean(values)),
            std=float(np.std(values)),
            min=float(np.min(values)),
            max=float(np.max(values)),
        )

@dataclass(frozen=True)
class StatsReport:
    """Отчёт по потоку: интервалы между метками времени и события на метку."""
    num_events: int
    duration_us: int
    sampling_time_us: SummaryStats
    events_per_timestamp: SummaryStats
    events_per_label_period: Optional[SummaryStats] = None
    label_period_us: Optional[int] = None

def stream_stats(stream: EventStream, label_period: Optional[int] = None) -> StatsReport:
    """Считает статистику по уникальным меткам времени потока.

    Интервалы берутся между соседними уникальными метками времени; СКО
    генеральное (ddof=0).
    """
    if len(stream) == 0:
        raise DataError("Статистика пустого потока не определена")

    timestamps, counts = np.unique(stream.t, return_counts=True)
    gaps = np.diff(timestamps)

    per_period = None
    if label_period:
        if label_period <= 0:
            raise DataError(f"Период меток должен быть положительным: {label_period}")
        start = int(stream.t[0])
        windows = (stream.t - start) // label_period
        per_period = SummaryStats.of(np.bincount(windows))

    report = StatsReport(
        num_events=len(stream),
        duration_us=int(stream.t[-1] - stream.t[0]),
        sampling_time_us=SummaryStats.of(gaps),
        events_per_timestamp=SummaryStats.of(counts),
        events_per_label_period=per_period,
        label_period_us=label_period,
    )
    logger.debug(f"📊 Статистика: {len(timestamps)} уникальных меток времени")
    return report
