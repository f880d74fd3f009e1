"""Составная функция потерь: рамки, уверенность, синаптические операции."""

from typing import Optional, Sequence, Union

import torch

from config.settings import LossWeights
from core.exceptions import DataError

Number = Union[float, torch.Tensor]

def loss_box(pred_boxes: torch.Tensor, target_boxes: torch.Tensor) -> torch.Tensor:
    """Сумма квадратов разностей по 4 координатам каждой сопоставленной рамки."""
    pred_boxes = torch.as_tensor(pred_boxes)
    target_boxes = torch.as_tensor(target_boxes, dtype=pred_boxes.dtype)
    if pred_boxes.shape != target_boxes.shape:
        raise DataError(f"Число рамок не совпадает: {tuple(pred_boxes.shape)} и {tuple(target_boxes.shape)}")
    if pred_boxes.numel() and pred_boxes.shape[-1] != 4:
        raise DataError(f"Ожидается 4 координаты на рамку, получено {pred_boxes.shape[-1]}")
    return ((pred_boxes - target_boxes) ** 2).sum()

def loss_conf(pred_conf: torch.Tensor, target_conf: torch.Tensor) -> torch.Tensor:
    """Сумма квадратов по всем ячейкам и якорям, цель 0 вне ячейки-владельца."""
    pred_conf = torch.as_tensor(pred_conf)
    target_conf = torch.as_tensor(target_conf, dtype=pred_conf.dtype)
    if pred_conf.shape != target_conf.shape:
        raise DataError(f"Формы уверенностей не совпадают: {tuple(pred_conf.shape)} и {tuple(target_conf.shape)}")
    return ((pred_conf - target_conf) ** 2).sum()

def loss_syn(per_layer_syn_ops: Sequence[Number], target: float = 1e6) -> Number:
    """sum_l (ops_l - target)^2 / target^2."""
    if target <= 0:
        raise DataError(f"Целевое число операций должно быть > 0: {target}")
    total: Number = 0.0
    for ops in per_layer_syn_ops:
        total = total + (ops - target) ** 2 / target ** 2
    return total

def total_loss(box: Number, conf: Number, syn: Number, weights: Optional[LossWeights] = None) -> Number:
    weights = weights or LossWeights()
    return weights.lambda_box * box + weights.lambda_conf * conf + weights.lambda_syn * syn
