"""Модели считывания: временной фильтр, сеточное предсказание, рамки."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import torch

GRID_SIZE = 4
NUM_ANCHORS = 2
BOX_COMPONENTS = 5  # x_tr, y_tr, x_bl, y_bl, conf
OUTPUT_CHANNELS = GRID_SIZE * GRID_SIZE * NUM_ANCHORS * BOX_COMPONENTS
FRAME_SIZE = 64

@dataclass(frozen=True)
class BBox:
    """Рамка в пикселях кадра 64x64."""
    x_min: float
    y_min: float
    x_max: float
    y_max: float
    confidence: float = 1.0

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"Некорректная рамка {self}")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)

@dataclass(frozen=True, eq=False)
class TemporalFilter:
    """Фиксированное причинное ядро взвешенной суммы."""
    tau_mem: float
    tau_syn: float
    size: int
    weights: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.shape != (self.size,):
            raise ValueError(f"Ожидается {self.size} весов, получено {weights.shape}")
        if not np.all(np.isfinite(weights)) or weights[0] <= 0:
            raise ValueError("Веса фильтра должны быть конечными, weights[0] > 0")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

@dataclass(eq=False)
class GridPrediction:
    """Тензор (T, 4, 4, 2, 5): бин, строка, столбец, якорь, компонента.

    Координаты нормированы к [0, 1] кадра; масштаб 64 применяется при
    построении рамок.
    """
    tensor: torch.Tensor

    def __post_init__(self):
        expected = (GRID_SIZE, GRID_SIZE, NUM_ANCHORS, BOX_COMPONENTS)
        if tuple(self.tensor.shape[-4:]) != expected:
            raise ValueError(f"Ожидается (..., 4, 4, 2, 5), получено {tuple(self.tensor.shape)}")

    @property
    def num_bins(self) -> int:
        return self.tensor.shape[0]

    @property
    def coords(self) -> torch.Tensor:
        return self.tensor[..., :4]

    @property
    def confidence(self) -> torch.Tensor:
        return self.tensor[..., 4]
