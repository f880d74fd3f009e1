"""Ошибка центроида в пикселях кадра 64x64."""

import math
from typing import Sequence, Tuple

import numpy as np

def centroid_error(pred_centroid: Sequence[float], label: Sequence[float]) -> float:
    """Евклидово расстояние между центроидом рамки и меткой."""
    return math.hypot(float(pred_centroid[0]) - float(label[0]), float(pred_centroid[1]) - float(label[1]))

def centroid_errors(pred_centroids: np.ndarray, labels: np.ndarray) -> np.ndarray:
    pred_centroids = np.asarray(pred_centroids, dtype=np.float64).reshape(-1, 2)
    labels = np.asarray(labels, dtype=np.float64).reshape(-1, 2)
    return np.hypot(*(pred_centroids - labels).T)

def error_summary(errors: np.ndarray) -> Tuple[float, float]:
    """Среднее и СКО (ddof=0); NaN для пустого набора."""
    errors = np.asarray(errors, dtype=np.float64)
    if errors.size == 0:
        return math.nan, math.nan
    return float(errors.mean()), float(errors.std())
