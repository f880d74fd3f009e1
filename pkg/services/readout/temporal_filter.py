"""Временной фильтр взвешенной суммы: свёртка синаптического и мембранного ядер."""

import logging
from typing import Union

import numpy as np
import torch
import torch.nn.functional as F

from core.exceptions import DataError
from models.detection import TemporalFilter

logger = logging.getLogger(__name__)

def build_filter(tau_mem: float, tau_syn: float, size: int = 20) -> TemporalFilter:
    """Веса = (S * M)[t], t = 0..N-1, где S[t] = exp(-t/tau_syn), M[t] = exp(-t/tau_mem)."""
    if tau_mem <= 0 or tau_syn <= 0:
        raise DataError(f"Постоянные времени должны быть > 0: tau_mem={tau_mem}, tau_syn={tau_syn}")
    if size < 1:
        raise DataError(f"Размер ядра должен быть >= 1, получено {size}")

    t = np.arange(size, dtype=np.float64)
    synaptic = np.exp(-t / tau_syn)
    membrane = np.exp(-t / tau_mem)
    weights = np.convolve(synaptic, membrane)[:size]
    return TemporalFilter(tau_mem=tau_mem, tau_syn=tau_syn, size=size, weights=weights)

def identity_filter() -> TemporalFilter:
    """Фильтр-заглушка с одним весом 1 (считывание без фильтра)."""
    return TemporalFilter(tau_mem=0.0, tau_syn=0.0, size=1, weights=np.ones(1))

def apply_filter(filt: TemporalFilter,
                 spikes: Union[torch.Tensor, np.ndarray]) -> Union[torch.Tensor, np.ndarray]:
    """y[t] = sum_i w[i] * x[t - i] по каждому каналу, x[t < 0] = 0.

    Вход (T, C) или (B, T, C); numpy на входе даёт numpy на выходе.
    """
    as_numpy = isinstance(spikes, np.ndarray)
    x = torch.from_numpy(np.asarray(spikes, dtype=np.float64)) if as_numpy else spikes
    if x.ndim not in (2, 3) or x.shape[-2] < 1:
        raise DataError(f"Ожидается (T, C) или (B, T, C), получено {tuple(x.shape)}")

    squeeze = x.ndim == 2
    if squeeze:
        x = x.unsqueeze(0)
    batch, steps, channels = x.shape

    kernel = torch.as_tensor(filt.weights, dtype=x.dtype, device=x.device).flip(0).view(1, 1, -1)
    signal = x.permute(0, 2, 1).reshape(batch * channels, 1, steps)
    signal = F.pad(signal, (filt.size - 1, 0))
    y = F.conv1d(signal, kernel).reshape(batch, channels, steps).permute(0, 2, 1)

    if squeeze:
        y = y.squeeze(0)
    return y.numpy() if as_numpy else y
