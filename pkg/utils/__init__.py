"""Пакет утилит."""

from .formatters import (format_table, format_stats_report, format_slice_summary, format_complexity,
                         format_footprints, format_verdicts, format_assignment, format_firing_rates,
                         format_eval)

__all__ = [
    "format_table",
    "format_stats_report",
    "format_slice_summary",
    "format_complexity",
    "format_footprints",
    "format_verdicts",
    "format_assignment",
    "format_firing_rates",
    "format_eval",
]
