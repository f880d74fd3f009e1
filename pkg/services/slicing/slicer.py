"""Нарезка записи на бинарные кадры (T, 2, H, W).

Два режима: фиксированное окно dt и динамическое окно, закрывающееся после
N уникальных пикселей. Бины заполняются назад во времени от метки-якоря.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import DataError
from models.events import EventStream, PupilLabel, Recording
from models.frames import DYNAMIC, FIXED, EventFrameSequence, SliceConfig

logger = logging.getLogger(__name__)

def resolve_polarity(on_count, off_count) -> Tuple[np.ndarray, np.ndarray]:
    """Оставляет полярность с большим числом событий; ничья за ON.

    Порядок маскирования: OFF обнуляется, где on >= off; затем ON
    обнуляется, где on < off; результат обрезается до {0, 1}.
    """
    on = np.array(on_count, dtype=np.int64, copy=True)
    off = np.array(off_count, dtype=np.int64, copy=True)
    if np.any(on < 0) or np.any(off < 0):
        raise DataError("Число событий не может быть отрицательным")
    off[on >= off] = 0
    on[on < off] = 0
    return np.clip(on, 0, 1).astype(np.uint8), np.clip(off, 0, 1).astype(np.uint8)

def interpolate_labels(labels: Sequence[PupilLabel], times: np.ndarray) -> np.ndarray:
    """Линейная интерполяция меток в моменты times, (len(times), 2)."""
    if len(labels) < 1:
        raise DataError("Для интерполяции нужна хотя бы одна метка")
    label_t = np.array([label.t for label in labels], dtype=np.float64)
    label_x = np.array([label.x for label in labels], dtype=np.float64)
    label_y = np.array([label.y for label in labels], dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    # np.interp возвращает крайнюю метку за пределами диапазона
    return np.stack([np.interp(times, label_t, label_x), np.interp(times, label_t, label_y)], axis=-1)

def interpolate_label(labels: Sequence[PupilLabel], t: int) -> PupilLabel:
    """Взвешенная интерполяция метки по двум ближайшим соседям."""
    x, y = interpolate_labels(labels, np.array([t]))[0]
    return PupilLabel(int(t), float(x), float(y))

def _check_inputs(rec: Recording, cfg: SliceConfig, anchor_label_index: int) -> int:
    stream = rec.stream
    if (stream.width, stream.height) != (cfg.width, cfg.height):
        raise DataError(f"Разрешение потока {stream.width}x{stream.height} не совпадает "
                        f"с конфигурацией {cfg.width}x{cfg.height}")
    if not rec.labels:
        raise DataError("Запись без меток")
    if not -len(rec.labels) <= anchor_label_index < len(rec.labels):
        raise DataError(f"Индекс якоря {anchor_label_index} вне [0, {len(rec.labels)})")
    return int(rec.labels[anchor_label_index].t)

def _accumulate(frame: np.ndarray, x: np.ndarray, y: np.ndarray, p: np.ndarray) -> None:
    """Накапливает события одного бина и восстанавливает 1-битный канал."""
    counts = np.zeros((2,) + frame.shape[1:], dtype=np.int64)
    np.add.at(counts, (p.astype(np.intp), y, x), 1)
    on_bit, off_bit = resolve_polarity(counts[1], counts[0])
    frame[0] = off_bit
    frame[1] = on_bit

def _last_unique_window(pixels: np.ndarray, end: int, n_unique: int) -> Optional[int]:
    """Начало самого длинного окна [start, end) ровно с n_unique пикселями.

    Окно растёт назад от end, включая повторы уже задетых пикселей, и
    останавливается перед событием, которое дало бы (n_unique + 1)-й пиксель.
    None, если до начала потока набирается меньше n_unique пикселей.
    """
    seen = set()
    j = end - 1
    while j >= 0:
        pixel = pixels[j]
        if pixel not in seen:
            if len(seen) == n_unique:
                break
            seen.add(pixel)
        j -= 1
    if len(seen) < n_unique:
        return None
    return j + 1

def _finalize_times(ends: np.ndarray, padded: int, anchor_time: int) -> np.ndarray:
    """Синтетические времена для пустых бинов и строгая монотонность."""
    ends = ends.copy()
    num_bins = len(ends)
    if padded >= num_bins:
        ends[:] = anchor_time - np.arange(num_bins - 1, -1, -1)
        return ends
    for i in range(padded - 1, -1, -1):
        ends[i] = ends[i + 1] - 1
    for i in range(num_bins - 2, -1, -1):
        if ends[i] >= ends[i + 1]:
            ends[i] = ends[i + 1] - 1
    return ends

def slice_dynamic(rec: Recording, cfg: SliceConfig, anchor_label_index: int = -1) -> EventFrameSequence:
    """Динамическая нарезка: каждый бин содержит ровно N активных пикселей."""
    if cfg.mode != DYNAMIC:
        raise DataError(f"slice_dynamic ожидает режим {DYNAMIC}, получено {cfg.mode}")
    anchor_time = _check_inputs(rec, cfg, anchor_label_index)
    stream = rec.stream

    pixels = stream.y.astype(np.int64) * cfg.width + stream.x
    end = int(np.searchsorted(stream.t, anchor_time, side="right"))

    frames = np.zeros((cfg.num_bins, 2, cfg.height, cfg.width), dtype=np.uint8)
    ends = np.zeros(cfg.num_bins, dtype=np.int64)
    padded = 0

    for i in reversed(range(cfg.num_bins)):
        start = _last_unique_window(pixels, end, cfg.n_events)
        if start is None:
            padded = i + 1
            break
        _accumulate(frames[i], stream.x[start:end], stream.y[start:end], stream.p[start:end])
        ends[i] = stream.t[end - 1]
        end = start

    if padded:
        logger.warning(f"⚠️ События закончились: {padded} ранних бинов пустые (N={cfg.n_events})")

    ends = _finalize_times(ends, padded, anchor_time)
    return EventFrameSequence(
        frames=frames,
        bin_end_times=ends,
        labels=interpolate_labels(rec.labels, ends),
        padded_bins=padded,
        metadata={"mode": DYNAMIC, "n_events": cfg.n_events,
                  "anchor_index": anchor_label_index, "anchor_time": anchor_time},
    )

def slice_fixed(rec: Recording, cfg: SliceConfig, anchor_label_index: int = -1) -> EventFrameSequence:
    """Фиксированная нарезка: бины (end - dt, end], последний кончается на якоре."""
    if cfg.mode != FIXED:
        raise DataError(f"slice_fixed ожидает режим {FIXED}, получено {cfg.mode}")
    if not cfg.dt_us or cfg.dt_us <= 0:
        raise DataError(f"dt должен быть > 0, получено {cfg.dt_us}")
    anchor_time = _check_inputs(rec, cfg, anchor_label_index)
    stream = rec.stream
    dt = int(cfg.dt_us)
    num_bins = cfg.num_bins

    ends = anchor_time - dt * np.arange(num_bins - 1, -1, -1, dtype=np.int64)
    window_start = int(ends[0]) - dt
    lo = int(np.searchsorted(stream.t, window_start, side="right"))
    hi = int(np.searchsorted(stream.t, anchor_time, side="right"))

    t = stream.t[lo:hi]
    bins = num_bins - 1 - (anchor_time - t) // dt

    counts = np.zeros((num_bins, 2, cfg.height, cfg.width), dtype=np.int64)
    np.add.at(counts, (bins.astype(np.intp), stream.p[lo:hi].astype(np.intp),
                       stream.y[lo:hi], stream.x[lo:hi]), 1)
    on_bit, off_bit = resolve_polarity(counts[:, 1], counts[:, 0])
    frames = np.stack([off_bit, on_bit], axis=1)

    first_event = int(stream.t[0]) if len(stream) else anchor_time + 1
    padded = int(np.sum(ends < first_event))

    return EventFrameSequence(
        frames=frames,
        bin_end_times=ends,
        labels=interpolate_labels(rec.labels, ends),
        padded_bins=padded,
        metadata={"mode": FIXED, "dt_us": dt,
                  "anchor_index": anchor_label_index, "anchor_time": anchor_time},
    )

def slice_recording(rec: Recording, cfg: SliceConfig, anchor_label_index: int = -1) -> EventFrameSequence:
    """Выбирает нарезку по режиму конфигурации."""
    if cfg.mode == DYNAMIC:
        return slice_dynamic(rec, cfg, anchor_label_index)
    return slice_fixed(rec, cfg, anchor_label_index)

def default_anchors(rec: Recording) -> List[int]:
    """Индексы меток, до которых в потоке уже есть события."""
    if len(rec.stream) == 0:
        return []
    first = int(rec.stream.t[0])
    return [i for i, label in enumerate(rec.labels) if label.t >= first]

def slice_dataset(rec: Recording, cfg: SliceConfig,
                  anchors: Optional[Sequence[int]] = None, jobs: int = 1) -> List[EventFrameSequence]:
    """Нарезает по последовательности на каждую метку-якорь."""
    anchors = list(default_anchors(rec) if anchors is None else anchors)
    if jobs > 1 and len(anchors) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            sequences = list(pool.map(lambda a: slice_recording(rec, cfg, a), anchors))
    else:
        sequences = [slice_recording(rec, cfg, a) for a in anchors]

    logger.info(f"🎞️ Нарезано {len(sequences)} последовательностей ({cfg.mode}, T={cfg.num_bins})")
    return sequences
