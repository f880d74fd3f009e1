"""Запись и чтение EventFrameSequence: JSON-заголовок + байты тензора."""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np

from core.exceptions import DataError
from models.frames import EventFrameSequence

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

def save_sequence(seq: EventFrameSequence, path: PathLike) -> Path:
    """Сохраняет последовательность; тензор по байту на элемент, порядок (t, c, y, x)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    header = {
        "shape": list(seq.shape),
        "bin_end_times": seq.bin_end_times.tolist(),
        "labels": seq.labels.tolist(),
        "padded_bins": int(seq.padded_bins),
        "metadata": seq.metadata,
    }
    with open(path, "wb") as f:
        f.write(json.dumps(header).encode("utf-8") + b"\n")
        f.write(np.ascontiguousarray(seq.frames, dtype=np.uint8).tobytes())

    logger.debug(f"💾 Последовательность {seq.shape} сохранена в {path}")
    return path

def load_sequence(path: PathLike) -> EventFrameSequence:
    """Читает последовательность, записанную save_sequence."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"Файл не найден: {path}")

    with open(path, "rb") as f:
        try:
            header = json.loads(f.readline().decode("utf-8"))
            shape = tuple(int(v) for v in header["shape"])
        except (ValueError, KeyError, TypeError) as e:
            raise DataError(f"{path}: некорректный заголовок: {e}") from e
        payload = f.read()

    if len(shape) != 4 or len(payload) != int(np.prod(shape)):
        raise DataError(f"{path}: размер данных {len(payload)} не соответствует форме {shape}")

    frames = np.frombuffer(payload, dtype=np.uint8).reshape(shape).copy()
    if frames.size and frames.max() > 1:
        raise DataError(f"{path}: тензор содержит значения вне {{0, 1}}")

    return EventFrameSequence(
        frames=frames,
        bin_end_times=np.asarray(header.get("bin_end_times", []), dtype=np.int64),
        labels=np.asarray(header.get("labels", []), dtype=np.float64),
        padded_bins=int(header.get("padded_bins", 0)),
        metadata=dict(header.get("metadata", {})),
    )
