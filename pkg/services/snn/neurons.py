"""Нейроны integrate-and-fire без утечки, дискретное время."""

import logging
from typing import Optional, Tuple

import torch
from torch import nn

from core.exceptions import DataError
from services.learning.surrogate import spike

logger = logging.getLogger(__name__)

RESET_GRAD_MODES = ("stop", "pass")

def if_step(v: torch.Tensor, input_current: torch.Tensor, threshold: float = 1.0, v_min: float = -1.0,
            alpha: float = 1.0, beta: float = 10.0,
            reset_grad: str = "stop") -> Tuple[torch.Tensor, torch.Tensor]:
    """Один шаг: V += I; спайк при V >= threshold со сбросом в 0; V не ниже v_min.

    reset_grad="stop" не пропускает градиент через ветку сброса.
    """
    if reset_grad not in RESET_GRAD_MODES:
        raise DataError(f"Неизвестный режим градиента сброса: {reset_grad}")
    v = torch.as_tensor(v)
    input_current = torch.as_tensor(input_current, dtype=v.dtype)
    if v.shape != input_current.shape:
        raise DataError(f"Формы не совпадают: V {tuple(v.shape)}, I {tuple(input_current.shape)}")

    v = v + input_current
    spikes = spike(v, threshold, alpha, beta)
    gate = spikes.detach() if reset_grad == "stop" else spikes
    v = v * (1.0 - gate)
    v = torch.clamp(v, min=v_min)
    return spikes, v

class IFNeuron(nn.Module):
    """Слой IF-нейронов с мембранным потенциалом, живущим между шагами."""

    def __init__(self, threshold: float = 1.0, v_min: float = -1.0, alpha: float = 1.0,
                 beta: float = 10.0, reset_grad: str = "stop"):
        super().__init__()
        if threshold <= v_min:
            raise DataError("threshold должен быть больше v_min")
        if reset_grad not in RESET_GRAD_MODES:
            raise DataError(f"Неизвестный режим градиента сброса: {reset_grad}")
        self.threshold = threshold
        self.v_min = v_min
        self.alpha = alpha
        self.beta = beta
        self.reset_grad = reset_grad
        self.v: Optional[torch.Tensor] = None

    def reset_state(self) -> None:
        self.v = None

    def detach_state(self) -> None:
        """Отрывает состояние от графа (обучение без сброса между итерациями)."""
        if self.v is not None:
            self.v = self.v.detach()

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if self.v is None or self.v.shape != x.shape:
            if self.v is not None:
                logger.debug(f"🔧 Форма состояния изменилась {tuple(self.v.shape)} -> {tuple(x.shape)}, сброс")
            self.v = torch.zeros_like(x)
        spikes, self.v = if_step(self.v, x, self.threshold, self.v_min,
                                 self.alpha, self.beta, self.reset_grad)
        return spikes

    def extra_repr(self) -> str:
        return f"threshold={self.threshold}, v_min={self.v_min}, reset_grad={self.reset_grad}"
