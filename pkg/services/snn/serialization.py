"""Файлы описания сети (JSON) и весов (JSON-заголовок + float32 LE)."""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
import torch
from pydantic import ValidationError

from core.exceptions import DataError
from models.network import NetworkConfig, parse_layers
from services.snn.network import RetinaNet

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
WEIGHT_DTYPE = np.dtype("<f4")

def save_network(config: NetworkConfig, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(config.to_json(), encoding="utf-8")
    logger.debug(f"💾 Описание сети {config.name} сохранено в {path}")
    return path

def load_network(path: PathLike) -> NetworkConfig:
    """Читает описание сети: объект NetworkConfig или голый список слоёв."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"Файл не найден: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(data, list):
            return NetworkConfig(layers=parse_layers(data), name=path.stem)
        return NetworkConfig.model_validate(data)
    except (ValueError, ValidationError) as e:
        raise DataError(f"{path}: некорректное описание сети: {e}") from e

def _float_entries(net: RetinaNet):
    for key, tensor in net.state_dict().items():
        if tensor.is_floating_point():
            yield key, tensor

def save_weights(net: RetinaNet, path: PathLike) -> Path:
    """Веса в порядке объявления слоёв, 32-битные little-endian."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    entries = []
    chunks = []
    for key, tensor in _float_entries(net):
        entries.append({"key": key, "shape": list(tensor.shape)})
        chunks.append(tensor.detach().cpu().numpy().astype(WEIGHT_DTYPE).tobytes())

    header = {"network": net.config.name, "dtype": WEIGHT_DTYPE.str, "tensors": entries}
    with open(path, "wb") as f:
        f.write(json.dumps(header).encode("utf-8") + b"\n")
        for chunk in chunks:
            f.write(chunk)

    logger.info(f"💾 Веса ({len(entries)} тензоров) сохранены в {path}")
    return path

def load_weights(net: RetinaNet, path: PathLike) -> RetinaNet:
    """Загружает веса в сеть той же архитектуры."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"Файл не найден: {path}")

    with open(path, "rb") as f:
        try:
            header = json.loads(f.readline().decode("utf-8"))
            entries = header["tensors"]
        except (ValueError, KeyError, TypeError) as e:
            raise DataError(f"{path}: некорректный заголовок весов: {e}") from e
        payload = f.read()

    expected = dict(_float_entries(net))
    if [e["key"] for e in entries] != list(expected):
        raise DataError(f"{path}: набор тензоров не соответствует сети {net.config.name}")

    state = net.state_dict()
    offset = 0
    for entry in entries:
        key, shape = entry["key"], tuple(entry["shape"])
        if shape != tuple(expected[key].shape):
            raise DataError(f"{path}: {key} имеет форму {shape}, ожидается {tuple(expected[key].shape)}")
        count = int(np.prod(shape)) if shape else 1
        end = offset + count * WEIGHT_DTYPE.itemsize
        if end > len(payload):
            raise DataError(f"{path}: файл обрезан на тензоре {key}")
        values = np.frombuffer(payload[offset:end], dtype=WEIGHT_DTYPE).reshape(shape)
        state[key] = torch.from_numpy(values.copy()).to(dtype=expected[key].dtype)
        offset = end
    if offset != len(payload):
        raise DataError(f"{path}: лишние {len(payload) - offset} байт после весов")

    net.load_state_dict(state)
    logger.info(f"📥 Веса загружены из {path.name}")
    return net
