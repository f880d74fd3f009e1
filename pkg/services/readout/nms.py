"""Жадное подавление немаксимумов и центроид рамки."""

from typing import List, Sequence, Tuple

from models.detection import BBox

def iou(a: BBox, b: BBox) -> float:
    """Пересечение над объединением; 0 для вырожденного объединения."""
    w = max(0.0, min(a.x_max, b.x_max) - max(a.x_min, b.x_min))
    h = max(0.0, min(a.y_max, b.y_max) - max(a.y_min, b.y_min))
    inter = w * h
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    return inter / union

def nms(boxes: Sequence[BBox], iou_threshold: float = 0.5) -> List[BBox]:
    """Оставляет рамку с наибольшей уверенностью и убирает пересекающиеся с ней с IoU > порога.

    При равной уверенности раньше идёт рамка с меньшими (x_min, y_min).
    """
    order = sorted(boxes, key=lambda b: (-b.confidence, b.x_min, b.y_min))
    kept: List[BBox] = []
    while order:
        best = order.pop(0)
        kept.append(best)
        order = [box for box in order if iou(best, box) <= iou_threshold]
    return kept

def centroid(box: BBox) -> Tuple[float, float]:
    return ((box.x_min + box.x_max) / 2, (box.y_min + box.y_max) / 2)
