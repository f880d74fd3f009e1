"""Слияние батч-нормализации со свёрткой для инференса."""

import logging

import torch
from torch import nn

from core.exceptions import DataError
from models.network import BatchNormSpec, ConvSpec, NetworkConfig
from services.snn.network import RetinaNet
from services.snn.neurons import IFNeuron

logger = logging.getLogger(__name__)

def fuse_batchnorm(conv: nn.Conv2d, bn: nn.BatchNorm2d) -> nn.Conv2d:
    """Свёртка со смещением, эквивалентная conv -> bn (в режиме eval).

    W' = diag(gamma / sqrt(var + eps)) W, b' = gamma (b - mean) / sqrt(var + eps) + beta.
    """
    if bn.num_features != conv.out_channels:
        raise DataError(f"BN на {bn.num_features} каналов, свёртка даёт {conv.out_channels}")

    fused = nn.Conv2d(conv.in_channels, conv.out_channels, kernel_size=conv.kernel_size,
                      stride=conv.stride, padding=conv.padding, dilation=conv.dilation,
                      groups=conv.groups, bias=True).to(device=conv.weight.device, dtype=conv.weight.dtype)

    with torch.no_grad():
        w_conv = conv.weight.clone().view(conv.out_channels, -1)
        scale = bn.weight.div(torch.sqrt(bn.eps + bn.running_var))
        fused.weight.copy_(torch.mm(torch.diag(scale), w_conv).view(fused.weight.size()))

        b_conv = torch.zeros(conv.out_channels, dtype=conv.weight.dtype, device=conv.weight.device) \
            if conv.bias is None else conv.bias
        b_bn = bn.bias - bn.weight.mul(bn.running_mean).div(torch.sqrt(bn.running_var + bn.eps))
        fused.bias.copy_(scale * b_conv + b_bn)

    return fused

def fuse_config(config: NetworkConfig) -> NetworkConfig:
    """Конфигурация без слоёв BN; свёртки перед ними получают смещение."""
    layers = []
    for i, layer in enumerate(config.layers):
        if isinstance(layer, BatchNormSpec) and i > 0 and isinstance(config.layers[i - 1], ConvSpec):
            continue
        following = config.layers[i + 1] if i + 1 < len(config.layers) else None
        if isinstance(layer, ConvSpec) and isinstance(following, BatchNormSpec):
            layer = layer.model_copy(update={"bias": True})
        layers.append(layer)
    return config.model_copy(update={"layers": layers, "name": f"{config.name}-fused"})

def fuse_network(net: RetinaNet) -> RetinaNet:
    """Новая сеть, в которой каждая пара conv+BN заменена одной свёрткой."""
    config = net.config
    fused_net = RetinaNet(fuse_config(config))
    param = next(net.parameters(), None)
    if param is not None:
        fused_net = fused_net.to(dtype=param.dtype, device=param.device)

    neurons = [m for m in fused_net.layers if isinstance(m, IFNeuron)]
    for source_neuron, neuron in zip((m for m in net.layers if isinstance(m, IFNeuron)), neurons):
        neuron.alpha = source_neuron.alpha
        neuron.beta = source_neuron.beta
        neuron.reset_grad = source_neuron.reset_grad

    target = iter([m for m in fused_net.layers if isinstance(m, nn.Conv2d)])
    fused_pairs = 0
    for i, (spec, module) in enumerate(zip(config.layers, net.layers)):
        if not isinstance(spec, ConvSpec):
            continue
        following = config.layers[i + 1] if i + 1 < len(config.layers) else None
        if isinstance(following, BatchNormSpec):
            source = fuse_batchnorm(module, net.layers[i + 1])
            fused_pairs += 1
        else:
            source = module
        destination = next(target)
        with torch.no_grad():
            destination.weight.copy_(source.weight)
            if destination.bias is not None:
                destination.bias.copy_(source.bias)

    fused_net.eval()
    logger.info(f"🔧 Слито пар conv+BN: {fused_pairs}")
    return fused_net
