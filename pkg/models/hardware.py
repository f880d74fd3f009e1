"""Модели аппаратного размещения: ядра и требования слоёв к памяти."""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

KI = 1024
KERNEL_BYTES_PER_ENTRY = 1  # 8-битные веса
NEURON_BYTES_PER_ENTRY = 2  # 16-битные состояния

@dataclass(frozen=True)
class CoreSpec:
    """Ядро процессора и его лимиты памяти (в Ki записей)."""
    id: int
    kernel_limit: float
    neuron_limit: float

SPECK_CORES: List[CoreSpec] = [
    CoreSpec(0, 16, 64),
    CoreSpec(1, 16, 64),
    CoreSpec(2, 16, 64),
    CoreSpec(3, 32, 32),
    CoreSpec(4, 32, 32),
    CoreSpec(5, 64, 16),
    CoreSpec(6, 64, 16),
    CoreSpec(7, 16, 16),
    CoreSpec(8, 16, 16),
]

@dataclass(frozen=True)
class LayerFootprint:
    """Требования слоя к памяти ядер, в записях."""
    layer_id: int
    kernel_entries: int
    neuron_entries: int
    kernel_entries_pow2: Optional[int] = None

    def __post_init__(self):
        if self.kernel_entries < 0 or self.neuron_entries < 0:
            raise ValueError("Объём памяти не может быть отрицательным")

    @property
    def kernel_ki(self) -> float:
        return self.kernel_entries / KI

    @property
    def neuron_ki(self) -> float:
        return self.neuron_entries / KI

    @property
    def kernel_bytes(self) -> int:
        return self.kernel_entries * KERNEL_BYTES_PER_ENTRY

    @property
    def neuron_bytes(self) -> int:
        return self.neuron_entries * NEURON_BYTES_PER_ENTRY

class Verdict(Enum):
    """Сверка с напечатанной таблицей архитектуры."""
    AS_PRINTED = "matches-as-printed"
    SWAPPED = "matches-with-columns-swapped"
    MISMATCH = "mismatch"

@dataclass(frozen=True)
class PrintedLayerRow:
    """Строка напечатанной таблицы: значения столбцов N_M и K_MT в Ki."""
    layer_id: int
    n_m_ki: float
    k_mt_ki: float
    cores: Optional[frozenset] = None  # None = "all"

# Таблица конфигурации сети, как она напечатана (столбцы N_M, K_MT, Cores ID)
PRINTED_LAYER_TABLE: List[PrintedLayerRow] = [
    PrintedLayerRow(1, 0.78, 15.02),
    PrintedLayerRow(2, 9.00, 64.00, frozenset({0, 1, 2})),
    PrintedLayerRow(3, 9.00, 4.00),
    PrintedLayerRow(4, 2.25, 1.00),
    PrintedLayerRow(5, 1.12, 0.50),
    PrintedLayerRow(6, 1.12, 1.00),
    PrintedLayerRow(7, 18.00, 1.12, frozenset({3, 4, 5, 6})),
    PrintedLayerRow(8, 34.37, 2.42, frozenset({5, 6})),
]
