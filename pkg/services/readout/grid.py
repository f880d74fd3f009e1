"""Сетка 4x4 с двумя якорями: декодирование выхода, цели и маскирование ячеек."""

import logging
from typing import List, Sequence, Tuple, Union

import numpy as np
import torch

from core.exceptions import DataError
from models.detection import (BOX_COMPONENTS, FRAME_SIZE, GRID_SIZE, NUM_ANCHORS, OUTPUT_CHANNELS,
                              BBox, GridPrediction)
from models.events import PupilLabel

logger = logging.getLogger(__name__)

CELL_SIZE = FRAME_SIZE // GRID_SIZE
TARGET_MARGIN = 2
MAX_COORD = FRAME_SIZE - 1

def decode_grid(filtered: torch.Tensor) -> GridPrediction:
    """(..., 160) -> (..., 4, 4, 2, 5): строка, столбец, якорь, (x_tr, y_tr, x_bl, y_bl, conf)."""
    filtered = torch.as_tensor(filtered)
    if filtered.shape[-1] != OUTPUT_CHANNELS:
        raise DataError(f"Ожидается {OUTPUT_CHANNELS} каналов, получено {filtered.shape[-1]}")
    shape = tuple(filtered.shape[:-1]) + (GRID_SIZE, GRID_SIZE, NUM_ANCHORS, BOX_COMPONENTS)
    return GridPrediction(filtered.reshape(shape))

def encode_grid(prediction: GridPrediction) -> torch.Tensor:
    """Обратное к decode_grid."""
    return prediction.tensor.reshape(tuple(prediction.tensor.shape[:-4]) + (OUTPUT_CHANNELS,))

def _label_xy(label: Union[PupilLabel, Sequence[float]]) -> Tuple[float, float]:
    if isinstance(label, PupilLabel):
        return float(label.x), float(label.y)
    x, y = label
    return float(x), float(y)

def make_target(label: Union[PupilLabel, Sequence[float]]) -> Tuple[BBox, Tuple[int, int]]:
    """Рамка label +- 2 px, обрезанная до [0, 63], и ячейка-владелец (строка, столбец)."""
    x, y = _label_xy(label)
    if not (0 <= x < FRAME_SIZE and 0 <= y < FRAME_SIZE):
        raise DataError(f"Метка ({x}, {y}) вне кадра {FRAME_SIZE}x{FRAME_SIZE}")

    box = BBox(
        x_min=float(np.clip(x - TARGET_MARGIN, 0, MAX_COORD)),
        y_min=float(np.clip(y - TARGET_MARGIN, 0, MAX_COORD)),
        x_max=float(np.clip(x + TARGET_MARGIN, 0, MAX_COORD)),
        y_max=float(np.clip(y + TARGET_MARGIN, 0, MAX_COORD)),
        confidence=1.0,
    )
    cell = (min(int(y // CELL_SIZE), GRID_SIZE - 1), min(int(x // CELL_SIZE), GRID_SIZE - 1))
    return box, cell

def build_target_grid(labels: np.ndarray, dtype: torch.dtype = torch.float32) -> Tuple[torch.Tensor, torch.Tensor]:
    """Плотная цель (..., 4, 4, 2, 5) и маска ячеек (..., 4, 4) по меткам (..., 2).

    Оба якоря ячейки-владельца получают нормированную рамку и уверенность 1.
    """
    labels = np.asarray(labels, dtype=np.float64)
    lead_shape = labels.shape[:-1]
    flat = labels.reshape(-1, 2)

    target = torch.zeros((len(flat), GRID_SIZE, GRID_SIZE, NUM_ANCHORS, BOX_COMPONENTS), dtype=dtype)
    mask = torch.zeros((len(flat), GRID_SIZE, GRID_SIZE), dtype=torch.bool)
    for n, (x, y) in enumerate(flat):
        box, (row, col) = make_target((x, y))
        # верхний правый и нижний левый углы: y растёт вниз
        corners = torch.tensor([box.x_max, box.y_min, box.x_min, box.y_max], dtype=dtype) / FRAME_SIZE
        target[n, row, col, :, :4] = corners
        target[n, row, col, :, 4] = 1.0
        mask[n, row, col] = True

    return (target.reshape(lead_shape + target.shape[1:]),
            mask.reshape(lead_shape + mask.shape[1:]))

def mask_cells(prediction: GridPrediction, target: Union[GridPrediction, torch.Tensor]) -> GridPrediction:
    """Обнуляет все компоненты ячеек, где в цели нет рамки.

    target: маска ячеек (..., 4, 4) или целевая сетка (..., 4, 4, 2, 5).
    """
    if isinstance(target, GridPrediction):
        target = target.tensor
    if target.dtype == torch.bool:
        mask = target
    else:
        mask = target[..., BOX_COMPONENTS - 1].amax(dim=-1) > 0
    if tuple(mask.shape) != tuple(prediction.tensor.shape[:-2]):
        raise DataError(f"Маска {tuple(mask.shape)} не подходит к предсказанию {tuple(prediction.tensor.shape)}")
    keep = mask[..., None, None].to(prediction.tensor.dtype)
    return GridPrediction(prediction.tensor * keep)

def grid_to_boxes(prediction: GridPrediction, bin_index: int = -1) -> List[BBox]:
    """Все 32 рамки одного бина в пикселях: углы упорядочены, обрезаны до [0, 63]."""
    cells = prediction.tensor
    if cells.ndim != 5:
        raise DataError(f"Ожидается (T, 4, 4, 2, 5), получено {tuple(cells.shape)}")
    values = cells[bin_index].detach().cpu().double().numpy().reshape(-1, BOX_COMPONENTS)

    boxes = []
    for x_tr, y_tr, x_bl, y_bl, conf in values:
        xs = np.clip(np.array([x_tr, x_bl]) * FRAME_SIZE, 0, MAX_COORD)
        ys = np.clip(np.array([y_tr, y_bl]) * FRAME_SIZE, 0, MAX_COORD)
        boxes.append(BBox(float(xs.min()), float(ys.min()), float(xs.max()), float(ys.max()), float(conf)))
    return boxes
