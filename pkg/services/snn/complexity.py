"""Пространственная трасса сети, число параметров и MAC."""

import logging
from dataclasses import dataclass
from typing import List

from core.exceptions import DataError, ShapeMismatchError
from models.network import (BatchNormSpec, ConvSpec, FlattenSpec, IFSpec, NetworkConfig,
                            SumPoolSpec)

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class TraceEntry:
    """Форма выхода слоя: каналы и размер карты f_x, f_y."""
    layer_index: int
    kind: str
    channels: int
    f_x: int
    f_y: int

    @property
    def size(self) -> int:
        return self.channels * self.f_x * self.f_y

def conv_output_size(c: int, k: int, p: int, s: int) -> int:
    """f = floor((c - k + 2p) / s) + 1."""
    return (c - k + 2 * p) // s + 1

def spatial_trace(net: NetworkConfig) -> List[TraceEntry]:
    """Формы выходов всех слоёв от входа (C, H, W) до последнего слоя."""
    channels, height, width = net.input_shape
    trace: List[TraceEntry] = []

    for i, layer in enumerate(net.layers):
        if isinstance(layer, ConvSpec):
            if layer.c_in != channels:
                raise ShapeMismatchError(f"свёртка ждёт {layer.c_in} каналов, приходит {channels}", i)
            width = conv_output_size(width, layer.k_x, layer.p_x, layer.s_x)
            height = conv_output_size(height, layer.k_y, layer.p_y, layer.s_y)
            channels = layer.c_out
        elif isinstance(layer, BatchNormSpec):
            if layer.channels != channels:
                raise ShapeMismatchError(f"нормализация на {layer.channels} каналов, приходит {channels}", i)
        elif isinstance(layer, SumPoolSpec):
            width = (width - layer.k) // layer.s + 1
            height = (height - layer.k) // layer.s + 1
        elif isinstance(layer, FlattenSpec):
            channels, height, width = channels * height * width, 1, 1
        elif not isinstance(layer, IFSpec):
            raise DataError(f"Неизвестный тип слоя {i}: {layer!r}")

        if width <= 0 or height <= 0:
            raise ShapeMismatchError(f"неположительный размер карты {width}x{height}", i)
        trace.append(TraceEntry(i, layer.kind, channels, width, height))

    return trace

def _fused_bias(net: NetworkConfig, index: int) -> bool:
    layer = net.layers[index]
    following = net.layers[index + 1] if index + 1 < len(net.layers) else None
    return layer.bias or isinstance(following, BatchNormSpec)

def count_params(net: NetworkConfig) -> int:
    """Веса свёрток плюс по смещению на выходной канал после слияния с BN."""
    total = 0
    for i in net.conv_indices:
        conv = net.layers[i]
        total += conv.c_in * conv.c_out * conv.kernel_area
        if _fused_bias(net, i):
            total += conv.c_out
    return total

def count_macs(net: NetworkConfig) -> int:
    """MAC одного плотного прохода: c_in * c_out * k_x * k_y * f_x * f_y по свёрткам."""
    trace = spatial_trace(net)
    total = 0
    for i in net.conv_indices:
        conv = net.layers[i]
        out = trace[i]
        total += conv.c_in * conv.c_out * conv.kernel_area * out.f_x * out.f_y
    logger.debug(f"📊 {net.name}: {total} MAC")
    return total
