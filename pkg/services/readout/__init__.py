"""Пакет считывания: фильтр, сетка, NMS, итоговые рамки."""

from .temporal_filter import build_filter, identity_filter, apply_filter
from .grid import decode_grid, encode_grid, make_target, build_target_grid, mask_cells, grid_to_boxes
from .nms import iou, nms, centroid
from .predictions import predict_boxes, write_predictions_csv

__all__ = [
    "build_filter",
    "identity_filter",
    "apply_filter",
    "decode_grid",
    "encode_grid",
    "make_target",
    "build_target_grid",
    "mask_cells",
    "grid_to_boxes",
    "iou",
    "nms",
    "centroid",
    "predict_boxes",
    "write_predictions_csv",
]
