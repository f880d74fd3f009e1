"""Пакет нарезки потока событий на кадры."""

from .slicer import (
    resolve_polarity,
    interpolate_label,
    interpolate_labels,
    slice_dynamic,
    slice_fixed,
    slice_recording,
    slice_dataset,
    default_anchors,
)
from .serialization import save_sequence, load_sequence

__all__ = [
    "resolve_polarity",
    "interpolate_label",
    "interpolate_labels",
    "slice_dynamic",
    "slice_fixed",
    "slice_recording",
    "slice_dataset",
    "default_anchors",
    "save_sequence",
    "load_sequence",
]
