"""Пространственные преобразования сенсор -> вход сети."""

import logging
from typing import List, Sequence, Tuple

import numpy as np

from core.exceptions import DataError
from models.events import EventStream, PupilLabel, Recording

logger = logging.getLogger(__name__)

SENSOR_WIDTH = 640
SENSOR_HEIGHT = 480
SQUARE_SIZE = 512
# Сохраняются столбцы x в [96, 607] включительно (ровно 512 значений)
CROP_X_MIN = 96
CROP_X_MAX = CROP_X_MIN + SQUARE_SIZE - 1
Y_SHIFT = 16

def _square_label(label: PupilLabel) -> Tuple[PupilLabel, bool]:
    x = label.x - CROP_X_MIN
    y = label.y + Y_SHIFT
    limit = np.nextafter(SQUARE_SIZE, 0)
    clipped = not (0 <= x < SQUARE_SIZE and 0 <= y < SQUARE_SIZE)
    return PupilLabel(label.t, float(np.clip(x, 0, limit)), float(np.clip(y, 0, limit))), clipped

def sensor_to_square(stream: EventStream,
                     labels: Sequence[PupilLabel] = ()) -> Tuple[EventStream, List[PupilLabel]]:
    """Переводит поток 640x480 в квадрат 512x512.

    Отбрасываются столбцы x < 96 и x > 607, затем x' = x - 96, y' = y + 16.
    Метки преобразуются так же; метка, попавшая за край, прижимается к кадру.
    """
    if (stream.width, stream.height) != (SENSOR_WIDTH, SENSOR_HEIGHT):
        raise DataError(f"Ожидается разрешение {SENSOR_WIDTH}x{SENSOR_HEIGHT}, "
                        f"получено {stream.width}x{stream.height}")

    keep = (stream.x >= CROP_X_MIN) & (stream.x <= CROP_X_MAX)
    squared = EventStream(
        SQUARE_SIZE,
        SQUARE_SIZE,
        stream.t[keep],
        stream.x[keep] - CROP_X_MIN,
        stream.y[keep] + Y_SHIFT,
        stream.p[keep],
    )

    out_labels = []
    clipped = 0
    for label in labels:
        new_label, was_clipped = _square_label(label)
        clipped += was_clipped
        out_labels.append(new_label)
    if clipped:
        logger.warning(f"⚠️ {clipped} меток вне области обрезки прижаты к кадру")

    logger.debug(f"✂️ Обрезка: оставлено {len(squared)} из {len(stream)} событий")
    return squared, out_labels

def sum_pool_events(stream: EventStream, factor: int) -> EventStream:
    """Понижает разрешение целочисленным делением координат на factor."""
    if factor <= 0:
        raise DataError(f"Коэффициент пулинга должен быть положительным: {factor}")
    if stream.width % factor or stream.height % factor:
        raise DataError(f"Коэффициент {factor} не делит разрешение {stream.width}x{stream.height}")

    return EventStream(
        stream.width // factor,
        stream.height // factor,
        stream.t,
        stream.x // factor,
        stream.y // factor,
        stream.p,
    )

def pool_labels(labels: Sequence[PupilLabel], factor: int) -> List[PupilLabel]:
    """Масштабирует метки под пулинг (вещественные координаты делятся на factor)."""
    return [PupilLabel(label.t, label.x / factor, label.y / factor) for label in labels]

def prepare_recording(recording: Recording, factor: int = 8, to_square: bool = True) -> Recording:
    """Полная подготовка записи: квадрат 512x512 и пулинг до 64x64."""
    stream = recording.stream
    labels = list(recording.labels)
    if to_square:
        stream, labels = sensor_to_square(stream, labels)
    pooled = sum_pool_events(stream, factor)
    prepared = Recording(pooled, pool_labels(labels, factor))
    logger.info(f"🔧 Запись подготовлена: {pooled.width}x{pooled.height}, "
                f"{len(pooled)} событий, {len(prepared.labels)} меток")
    return prepared
