"""Пакет обучения: суррогатный градиент, функции потерь, метрики.

Цикл обучения импортируется напрямую из services.learning.trainer.
"""

from .surrogate import SPIKE_TOLERANCE, surrogate_grad, SpikeFunction, spike, spike_tolerance
from .losses import loss_box, loss_conf, loss_syn, total_loss
from .metrics import centroid_error, centroid_errors, error_summary

__all__ = [
    "SPIKE_TOLERANCE",
    "spike_tolerance",
    "surrogate_grad",
    "SpikeFunction",
    "spike",
    "loss_box",
    "loss_conf",
    "loss_syn",
    "total_loss",
    "centroid_error",
    "centroid_errors",
    "error_summary",
]
