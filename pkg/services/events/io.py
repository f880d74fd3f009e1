"""Чтение и запись событий и меток (CSV и упакованный бинарный формат)."""

import csv
import json
import logging
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from core.exceptions import DataError
from models.events import EventStream, PupilLabel

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

EVENTS_HEADER = ["t_us", "x", "y", "p"]
LABELS_HEADER = ["t_us", "x", "y"]

# u64 t_us, u16 x, u16 y, u8 p, little-endian, без выравнивания
PACKED_DTYPE = np.dtype([("t", "<u8"), ("x", "<u2"), ("y", "<u2"), ("p", "u1")])

def _parse_int(value: str, name: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise DataError(f"Строка {line}: поле {name} не число: {value!r}") from None

def _sorted_stream(width: int, height: int, t, x, y, p) -> EventStream:
    """Собирает поток, при необходимости стабильно сортируя по t."""
    t = np.asarray(t, dtype=np.int64)
    if len(t) and np.any(np.diff(t) < 0):
        logger.warning("⚠️ События не отсортированы, применяется стабильная сортировка")
        order = np.argsort(t, kind="stable")
        t, x, y, p = t[order], np.asarray(x)[order], np.asarray(y)[order], np.asarray(p)[order]
    return EventStream(width, height, t, x, y, p)

def _load_csv(path: Path, width: int, height: int) -> EventStream:
    ts: List[int] = []
    xs: List[int] = []
    ys: List[int] = []
    ps: List[int] = []

    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        for line_no, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if line_no == 1 and row[0].strip() == EVENTS_HEADER[0]:
                continue
            if len(row) != 4:
                raise DataError(f"Строка {line_no}: ожидается 4 поля, получено {len(row)}")

            t = _parse_int(row[0], "t_us", line_no)
            x = _parse_int(row[1], "x", line_no)
            y = _parse_int(row[2], "y", line_no)
            p = _parse_int(row[3], "p", line_no)

            if t < 0:
                raise DataError(f"Строка {line_no}: отрицательное время {t}")
            if not 0 <= x < width:
                raise DataError(f"Строка {line_no}: x={x} вне диапазона [0, {width})")
            if not 0 <= y < height:
                raise DataError(f"Строка {line_no}: y={y} вне диапазона [0, {height})")
            if p not in (0, 1):
                raise DataError(f"Строка {line_no}: полярность {p} не из {{0, 1}}")

            ts.append(t)
            xs.append(x)
            ys.append(y)
            ps.append(p)

    return _sorted_stream(width, height, ts, xs, ys, ps)

def _load_bin(path: Path) -> EventStream:
    with open(path, "rb") as f:
        header_line = f.readline()
        try:
            header = json.loads(header_line.decode("utf-8"))
            width, height, count = int(header["width"]), int(header["height"]), int(header["count"])
        except (ValueError, KeyError, TypeError) as e:
            raise DataError(f"{path}: некорректный заголовок: {e}") from e
        payload = f.read()

    if len(payload) != count * PACKED_DTYPE.itemsize:
        raise DataError(f"{path}: ожидается {count} записей, размер данных {len(payload)} байт")

    records = np.frombuffer(payload, dtype=PACKED_DTYPE, count=count)
    if count:
        if records["x"].max() >= width or records["y"].max() >= height:
            raise DataError(f"{path}: координаты вне разрешения {width}x{height}")
        if records["p"].max() > 1:
            raise DataError(f"{path}: полярность не из {{0, 1}}")
        if records["t"].max() > np.iinfo(np.int64).max:
            raise DataError(f"{path}: метка времени вне диапазона")

    return _sorted_stream(width, height, records["t"].astype(np.int64), records["x"],
                          records["y"], records["p"])

def load_events(path: PathLike, fmt: str = "csv", width: int = 640, height: int = 480) -> EventStream:
    """Загружает поток событий.

    Для CSV разрешение задаётся аргументами, бинарный формат хранит его
    в JSON-заголовке.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"Файл не найден: {path}")

    if fmt == "csv":
        stream = _load_csv(path, width, height)
    elif fmt == "bin":
        stream = _load_bin(path)
    else:
        raise DataError(f"Неизвестный формат событий: {fmt}")

    logger.info(f"📥 Загружено {len(stream)} событий из {path.name} "
                f"({stream.width}x{stream.height})")
    return stream

def save_events(stream: EventStream, path: PathLike, fmt: str = "csv") -> Path:
    """Сохраняет поток событий в CSV или упакованный бинарный формат."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(EVENTS_HEADER)
            writer.writerows(zip(stream.t.tolist(), stream.x.tolist(),
                                 stream.y.tolist(), stream.p.tolist()))
    elif fmt == "bin":
        records = np.empty(len(stream), dtype=PACKED_DTYPE)
        records["t"] = stream.t
        records["x"] = stream.x
        records["y"] = stream.y
        records["p"] = stream.p
        header = {"width": stream.width, "height": stream.height, "count": len(stream)}
        with open(path, "wb") as f:
            f.write(json.dumps(header).encode("utf-8") + b"\n")
            f.write(records.tobytes())
    else:
        raise DataError(f"Неизвестный формат событий: {fmt}")

    logger.debug(f"💾 Сохранено {len(stream)} событий в {path}")
    return path

def load_labels(path: PathLike) -> List[PupilLabel]:
    """Загружает метки зрачка (CSV t_us,x,y)."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"Файл не найден: {path}")

    labels: List[PupilLabel] = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        for line_no, row in enumerate(reader, start=1):
            if not row:
                continue
            if line_no == 1 and row[0].strip() == LABELS_HEADER[0]:
                continue
            if len(row) != 3:
                raise DataError(f"{path.name}, строка {line_no}: ожидается 3 поля")
            try:
                labels.append(PupilLabel(int(row[0]), float(row[1]), float(row[2])))
            except ValueError:
                raise DataError(f"{path.name}, строка {line_no}: не число") from None

    logger.info(f"📥 Загружено {len(labels)} меток из {path.name}")
    return labels

def save_labels(labels: Sequence[PupilLabel], path: PathLike) -> Path:
    """Сохраняет метки зрачка в CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(LABELS_HEADER)
        for label in labels:
            writer.writerow([label.t, repr(float(label.x)), repr(float(label.y))])
    return path
