"""Пакет размещения слоёв сети по ядрам нейроморфного процессора."""

from .memory import kernel_memory, neuron_memory, layer_footprints, printed_footprints
from .mapper import compatible_cores, assign_layers, AssignmentResult
from .validation import validate_against_table, LayerVerdict

__all__ = [
    "kernel_memory",
    "neuron_memory",
    "layer_footprints",
    "printed_footprints",
    "compatible_cores",
    "assign_layers",
    "AssignmentResult",
    "validate_against_table",
    "LayerVerdict",
]
