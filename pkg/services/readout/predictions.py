"""Итоговая рамка на каждый бин и выгрузка предсказаний в CSV."""

import csv
import logging
from pathlib import Path
from typing import List, Sequence, Union

from models.detection import BBox, GridPrediction
from services.readout.grid import grid_to_boxes
from services.readout.nms import centroid, nms

logger = logging.getLogger(__name__)

PREDICTIONS_HEADER = ["bin", "x_min", "y_min", "x_max", "y_max", "conf", "cx", "cy"]

def predict_boxes(prediction: GridPrediction, iou_threshold: float = 0.5) -> List[BBox]:
    """После NMS для каждого бина остаётся рамка с наибольшей уверенностью."""
    return [nms(grid_to_boxes(prediction, t), iou_threshold)[0] for t in range(prediction.num_bins)]

def write_predictions_csv(boxes: Sequence[BBox], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(PREDICTIONS_HEADER)
        for i, box in enumerate(boxes):
            cx, cy = centroid(box)
            writer.writerow([i, f"{box.x_min:.4f}", f"{box.y_min:.4f}", f"{box.x_max:.4f}",
                             f"{box.y_max:.4f}", f"{box.confidence:.6f}", f"{cx:.4f}", f"{cy:.4f}"])
    logger.info(f"💾 Предсказания ({len(boxes)} бинов) записаны в {path}")
    return path
