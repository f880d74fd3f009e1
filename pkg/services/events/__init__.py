"""Пакет ввода-вывода и предобработки событий."""

from .io import load_events, save_events, load_labels, save_labels
from .transforms import sensor_to_square, sum_pool_events, pool_labels, prepare_recording
from .stats import stream_stats, StatsReport, SummaryStats

__all__ = [
    "load_events",
    "save_events",
    "load_labels",
    "save_labels",
    "sensor_to_square",
    "sum_pool_events",
    "pool_labels",
    "prepare_recording",
    "stream_stats",
    "StatsReport",
    "SummaryStats",
]
