"""Спайковая CNN, собранная по NetworkConfig, и прямой проход по бинам."""

import logging
from typing import List, Optional, Tuple, Union

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from core.exceptions import DataError, ShapeMismatchError
from models.frames import EventFrameSequence
from models.network import (BatchNormSpec, ConvSpec, FlattenSpec, IFSpec, NetworkConfig,
                            SumPoolSpec)
from services.snn.complexity import spatial_trace
from services.snn.neurons import IFNeuron
from services.snn.profiling import ForwardTrace

logger = logging.getLogger(__name__)

class SumPool2d(nn.Module):
    """Суммирующий пулинг (средний пулинг без деления)."""

    def __init__(self, kernel_size: int, stride: int):
        super().__init__()
        self.kernel_size = kernel_size
        self.stride = stride

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return F.avg_pool2d(x, self.kernel_size, self.stride, divisor_override=1)

class Flatten1x1(nn.Module):
    """(B, C, H, W) -> (B, C*H*W, 1, 1), порядок каналов C-major."""

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x.reshape(x.shape[0], -1, 1, 1)

def _conv_module(spec: ConvSpec) -> nn.Conv2d:
    return nn.Conv2d(spec.c_in, spec.c_out, kernel_size=(spec.k_y, spec.k_x),
                     stride=(spec.s_y, spec.s_x), padding=(spec.p_y, spec.p_x), bias=spec.bias)

def _batchnorm_module(spec: BatchNormSpec) -> nn.BatchNorm2d:
    bn = nn.BatchNorm2d(spec.channels, eps=spec.eps)
    with torch.no_grad():
        if spec.gamma is not None:
            bn.weight.copy_(torch.tensor(spec.gamma))
        if spec.beta is not None:
            bn.bias.copy_(torch.tensor(spec.beta))
        if spec.mean is not None:
            bn.running_mean.copy_(torch.tensor(spec.mean))
        if spec.var is not None:
            bn.running_var.copy_(torch.tensor(spec.var))
    return bn

class RetinaNet(nn.Module):
    """Сеть из BatchConv-IF(-Pool) блоков; модули идут в порядке config.layers."""

    def __init__(self, config: NetworkConfig, alpha: float = 1.0, beta: float = 10.0,
                 reset_grad: str = "stop"):
        super().__init__()
        self.config = config
        self._trace = spatial_trace(config)

        modules: List[nn.Module] = []
        for spec in config.layers:
            if isinstance(spec, ConvSpec):
                modules.append(_conv_module(spec))
            elif isinstance(spec, BatchNormSpec):
                modules.append(_batchnorm_module(spec))
            elif isinstance(spec, IFSpec):
                modules.append(IFNeuron(spec.threshold, spec.v_min, alpha, beta, reset_grad))
            elif isinstance(spec, SumPoolSpec):
                modules.append(SumPool2d(spec.k, spec.s))
            elif isinstance(spec, FlattenSpec):
                modules.append(Flatten1x1())
        self.layers = nn.ModuleList(modules)

    @property
    def if_layer_ids(self) -> List[int]:
        return self.config.if_indices

    @property
    def output_size(self) -> int:
        return self._trace[-1].size if self._trace else int(np.prod(self.config.input_shape))

    def reset_states(self) -> None:
        for module in self.layers:
            if isinstance(module, IFNeuron):
                module.reset_state()

    def detach_states(self) -> None:
        for module in self.layers:
            if isinstance(module, IFNeuron):
                module.detach_state()

    def step(self, x: torch.Tensor) -> Tuple[torch.Tensor, List[torch.Tensor], List[torch.Tensor]]:
        """Один бин через все слои.

        Возвращает выход, число спайков каждого IF-слоя и синаптические
        операции каждой свёртки (активность входа * разветвление, среднее по батчу).
        """
        spike_counts: List[torch.Tensor] = []
        synops: List[torch.Tensor] = []
        batch = x.shape[0]

        for i, (spec, module) in enumerate(zip(self.config.layers, self.layers)):
            if isinstance(spec, ConvSpec):
                if x.shape[1] != spec.c_in:
                    raise ShapeMismatchError(f"свёртка ждёт {spec.c_in} каналов, приходит {x.shape[1]}", i)
                fan_out = spec.c_out * spec.kernel_area / (spec.s_x * spec.s_y)
                synops.append(x.sum() * fan_out / batch)
            try:
                x = module(x)
            except RuntimeError as e:
                raise ShapeMismatchError(str(e), i) from e
            except DataError:
                raise
            except ValueError as e:
                raise DataError(f"слой {i}: {e}") from e
            if isinstance(spec, IFSpec):
                spike_counts.append(x.detach().sum())

        return x, spike_counts, synops

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.step(x)[0]

def _as_batch(frames: Union[EventFrameSequence, torch.Tensor, np.ndarray],
              dtype: torch.dtype, device) -> torch.Tensor:
    """Приводит вход к (B, T, C, H, W)."""
    if isinstance(frames, EventFrameSequence):
        frames = frames.frames
    tensor = torch.as_tensor(np.asarray(frames) if not isinstance(frames, torch.Tensor) else frames)
    tensor = tensor.to(dtype=dtype, device=device)
    if tensor.ndim == 4:
        tensor = tensor.unsqueeze(0)
    if tensor.ndim != 5:
        raise DataError(f"Ожидается (T, C, H, W) или (B, T, C, H, W), получено {tuple(tensor.shape)}")
    return tensor

def forward_sequence(net: RetinaNet, frames, reset: bool = True) -> Tuple[torch.Tensor, ForwardTrace]:
    """Прогоняет все бины последовательности; состояния живут между бинами.

    Возвращает спайки последнего слоя на каждом бине (B, T, C_out) и след.
    """
    param = next(net.parameters(), None)
    dtype = param.dtype if param is not None else torch.float32
    device = param.device if param is not None else None
    x = _as_batch(frames, dtype, device)

    if tuple(x.shape[2:]) != tuple(net.config.input_shape):
        raise ShapeMismatchError(f"вход {tuple(x.shape[2:])}, сеть ждёт {tuple(net.config.input_shape)}", 0)

    if reset:
        net.reset_states()

    batch, num_bins = x.shape[:2]
    outputs = []
    spikes = np.zeros((len(net.if_layer_ids), num_bins), dtype=np.float64)
    synops_total: Optional[List[torch.Tensor]] = None

    for t in range(num_bins):
        out, spike_counts, synops = net.step(x[:, t])
        outputs.append(out.reshape(batch, -1))
        spikes[:, t] = [float(count) for count in spike_counts]
        synops_total = synops if synops_total is None else [a + b for a, b in zip(synops_total, synops)]

    neurons = [net._trace[i].size for i in net.if_layer_ids]
    trace = ForwardTrace(
        layer_ids=list(net.if_layer_ids),
        neurons=neurons,
        spikes=spikes,
        batch_size=batch,
        synops=synops_total or [],
        synops_layer_ids=list(net.config.conv_indices),
    )
    return torch.stack(outputs, dim=1), trace

def build_network(config: NetworkConfig, alpha: float = 1.0, beta: float = 10.0,
                  reset_grad: str = "stop", seed: Optional[int] = None,
                  dtype: torch.dtype = torch.float32) -> RetinaNet:
    """Создаёт сеть; seed фиксирует начальные веса."""
    if seed is not None:
        torch.manual_seed(seed)
    net = RetinaNet(config, alpha=alpha, beta=beta, reset_grad=reset_grad).to(dtype)
    logger.info(f"🔧 Сеть {config.name}: {len(config.layers)} слоёв, выход {net.output_size} каналов")
    return net
