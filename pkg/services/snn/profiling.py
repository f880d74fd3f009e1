"""След прямого прохода и профиль частоты спайков по слоям."""

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
import torch

from core.exceptions import DataError

@dataclass(eq=False)
class ForwardTrace:
    """Спайки по IF-слоям и синаптические операции по свёрткам.

    spikes[l, t]: сумма спайков слоя l на шаге t по всему батчу;
    neurons[l]: число нейронов слоя l на один пример;
    synops: по одному скаляру на свёртку: сумма по времени, среднее по батчу
    (тензоры не оторваны от графа, чтобы входить в функцию потерь).
    """
    layer_ids: List[int]
    neurons: List[int]
    spikes: np.ndarray
    batch_size: int = 1
    synops: List[torch.Tensor] = field(default_factory=list)
    synops_layer_ids: List[int] = field(default_factory=list)

    def __post_init__(self):
        self.spikes = np.asarray(self.spikes, dtype=np.float64)
        if self.spikes.ndim != 2 or self.spikes.shape[0] != len(self.layer_ids):
            raise DataError(f"Ожидается массив спайков (слои, шаги), получено {self.spikes.shape}")
        if len(self.neurons) != len(self.layer_ids):
            raise DataError("Число слоёв в neurons и layer_ids не совпадает")

    @property
    def timesteps(self) -> int:
        return self.spikes.shape[1]

    def synops_values(self) -> List[float]:
        return [float(ops.detach()) for ops in self.synops]

def firing_rate_profile(trace: ForwardTrace) -> Dict[int, float]:
    """Частота = спайки / (нейроны * шаги * батч) для каждого IF-слоя."""
    if trace.timesteps == 0 or not trace.layer_ids:
        raise DataError("Пустой след: нет шагов или IF-слоёв")
    totals = trace.spikes.sum(axis=1)
    return {
        layer_id: float(total / (neurons * trace.timesteps * trace.batch_size))
        for layer_id, neurons, total in zip(trace.layer_ids, trace.neurons, totals)
    }
