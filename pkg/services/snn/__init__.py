"""Пакет спайковой CNN: нейроны, сеть, слияние BN, сложность, профиль."""

from .neurons import if_step, IFNeuron
from .network import RetinaNet, SumPool2d, Flatten1x1, forward_sequence, build_network
from .fusion import fuse_batchnorm, fuse_config, fuse_network
from .complexity import spatial_trace, conv_output_size, count_params, count_macs, TraceEntry
from .profiling import ForwardTrace, firing_rate_profile
from .serialization import save_network, load_network, save_weights, load_weights

__all__ = [
    "if_step",
    "IFNeuron",
    "RetinaNet",
    "SumPool2d",
    "Flatten1x1",
    "forward_sequence",
    "build_network",
    "fuse_batchnorm",
    "fuse_config",
    "fuse_network",
    "spatial_trace",
    "conv_output_size",
    "count_params",
    "count_macs",
    "TraceEntry",
    "ForwardTrace",
    "firing_rate_profile",
    "save_network",
    "load_network",
    "save_weights",
    "load_weights",
]
