"""Память ядер, требуемая слоями: ядра свёрток (K_MT) и состояния нейронов (N_M)."""

import logging
import math
from typing import List, Sequence

from models.hardware import KI, LayerFootprint, PrintedLayerRow, PRINTED_LAYER_TABLE
from models.network import ConvSpec, NetworkConfig
from services.snn.complexity import spatial_trace

logger = logging.getLogger(__name__)

def _ceil_log2(value: int) -> int:
    return math.ceil(math.log2(value)) if value > 1 else 0

def kernel_memory(conv: ConvSpec, pow2: bool = False) -> int:
    """Записи памяти ядра: точное c * kx * ky * f или c * 2^(ceil log2(kx ky) + ceil log2 f)."""
    if pow2:
        return conv.c_in * 2 ** (_ceil_log2(conv.kernel_area) + _ceil_log2(conv.c_out))
    return conv.c_in * conv.kernel_area * conv.c_out

def neuron_memory(f: int, f_x: int, f_y: int) -> int:
    """N_M = f * f_x * f_y."""
    if f <= 0 or f_x <= 0 or f_y <= 0:
        raise ValueError(f"Размеры должны быть положительными: f={f}, f_x={f_x}, f_y={f_y}")
    return f * f_x * f_y

def layer_footprints(net: NetworkConfig) -> List[LayerFootprint]:
    """Требования каждой свёртки (слои нумеруются с 1); нейроны считаются на выходе свёртки."""
    trace = spatial_trace(net)
    footprints = []
    for layer_id, index in enumerate(net.conv_indices, start=1):
        conv = net.layers[index]
        out = trace[index]
        footprints.append(LayerFootprint(
            layer_id=layer_id,
            kernel_entries=kernel_memory(conv),
            neuron_entries=neuron_memory(out.channels, out.f_x, out.f_y),
            kernel_entries_pow2=kernel_memory(conv, pow2=True),
        ))
    logger.debug(f"📊 {net.name}: рассчитано {len(footprints)} слоёв")
    return footprints

def printed_footprints(table: Sequence[PrintedLayerRow] = PRINTED_LAYER_TABLE) -> List[LayerFootprint]:
    """Требования по напечатанной таблице, прочитанной с переставленными столбцами.

    Столбец N_M содержит ядра, а столбец K_MT нейроны.
    """
    return [
        LayerFootprint(row.layer_id, round(row.n_m_ki * KI), round(row.k_mt_ki * KI))
        for row in table
    ]
