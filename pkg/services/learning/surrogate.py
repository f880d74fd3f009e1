"""Ступенчатая функция спайка с суррогатным градиентом."""

import math
from typing import Union

import torch

Number = Union[float, torch.Tensor]

# Допуск сравнения с порогом: накопленная сумма 10 x 0.1 в float64 равна 0.9999999999999999
SPIKE_TOLERANCE = 1e-9

def spike_tolerance(dtype: torch.dtype) -> float:
    return max(SPIKE_TOLERANCE, 8 * torch.finfo(dtype).eps)

def surrogate_grad(v: Number, threshold: float = 1.0, alpha: float = 1.0, beta: float = 10.0) -> Number:
    """Псевдопроизводная спайка: alpha * exp(-beta * |v - threshold|).

    Чётна относительно порога, строго положительна, максимум alpha на пороге.
    """
    if isinstance(v, torch.Tensor):
        return alpha * torch.exp(-beta * torch.abs(v - threshold))
    return alpha * math.exp(-beta * abs(float(v) - threshold))

class SpikeFunction(torch.autograd.Function):
    """Heaviside(v - threshold) в прямом проходе, surrogate_grad в обратном."""

    @staticmethod
    def forward(ctx, v, threshold: float = 1.0, alpha: float = 1.0, beta: float = 10.0):
        ctx.save_for_backward(v)
        ctx.threshold = threshold
        ctx.alpha = alpha
        ctx.beta = beta
        return (v >= threshold - spike_tolerance(v.dtype)).to(v.dtype)

    @staticmethod
    def backward(ctx, grad_output):
        (v,) = ctx.saved_tensors
        grad = grad_output * surrogate_grad(v, ctx.threshold, ctx.alpha, ctx.beta)
        return grad, None, None, None

def spike(v: torch.Tensor, threshold: float = 1.0, alpha: float = 1.0, beta: float = 10.0) -> torch.Tensor:
    return SpikeFunction.apply(v, threshold, alpha, beta)
