"""Обучение BPTT с суррогатным градиентом и оценка ошибки центроида."""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import torch
from tqdm import tqdm

from config.settings import LossWeights, TrainConfig
from core.exceptions import DataError, TrainingDivergedError
from models.detection import TemporalFilter
from models.frames import EventFrameSequence
from services.learning.losses import loss_box, loss_conf, loss_syn, total_loss
from services.learning.metrics import centroid_errors, error_summary
from services.readout import (apply_filter, build_filter, build_target_grid, centroid, decode_grid,
                              mask_cells, predict_boxes)
from services.snn.network import RetinaNet, forward_sequence
from services.snn.serialization import save_network, save_weights

logger = logging.getLogger(__name__)

TRAIN_LOG_HEADER = ["iter", "loss_total", "loss_box", "loss_conf", "loss_syn", "lr"]

@dataclass
class LossRecord:
    """Значения функции потерь на одной итерации."""
    iteration: int
    total: float
    box: float
    conf: float
    syn: float
    lr: float

@dataclass
class EvalResult:
    """Ошибка центроида по набору последовательностей."""
    mean_error: float
    std_error: float
    errors: np.ndarray
    boxes: List = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.errors)

@dataclass
class TrainingResult:
    net: RetinaNet
    history: List[LossRecord]
    validation: Optional[EvalResult] = None

    @property
    def losses(self) -> List[float]:
        return [record.total for record in self.history]

def split_dataset(dataset: Sequence[EventFrameSequence],
                  validation_fraction: float) -> Tuple[List[EventFrameSequence], List[EventFrameSequence]]:
    """Отделяет хвост по времени для валидации; обучающая часть не пустая."""
    dataset = list(dataset)
    n_val = int(math.floor(len(dataset) * validation_fraction))
    n_val = min(n_val, len(dataset) - 1)
    if n_val <= 0:
        return dataset, []
    return dataset[:-n_val], dataset[-n_val:]

def _stack(sequences: Sequence[EventFrameSequence], length: int) -> Tuple[np.ndarray, np.ndarray]:
    parts = [seq.tail(length) for seq in sequences]
    if len({part.shape for part in parts}) != 1:
        raise DataError("Последовательности в батче разной формы")
    return np.stack([p.frames for p in parts]), np.stack([p.labels for p in parts])

class Trainer:
    """Цикл обучения: Adam + StepLR, сброс состояний нейронов на каждой итерации."""

    def __init__(self, net: RetinaNet, config: Optional[TrainConfig] = None,
                 loss_weights: Optional[LossWeights] = None,
                 temporal_filter: Optional[TemporalFilter] = None, seed: int = 0):
        self.net = net
        self.config = config or TrainConfig()
        self.loss_weights = loss_weights or LossWeights()
        self.filter = temporal_filter or build_filter(5.0, 5.0, 20)
        self.rng = np.random.default_rng(seed)
        self.optimizer = torch.optim.Adam(net.parameters(), lr=self.config.lr,
                                          betas=tuple(self.config.adam_betas))
        self.scheduler = torch.optim.lr_scheduler.StepLR(self.optimizer, step_size=self.config.lr_step,
                                                         gamma=self.config.lr_gamma)

    @property
    def dtype(self) -> torch.dtype:
        param = next(self.net.parameters(), None)
        return param.dtype if param is not None else torch.float32

    def first_loss_bin(self, num_bins: int) -> int:
        """Первый бин, на котором окно фильтра заполнено (не дальше последнего бина)."""
        if not self.config.skip_filter_warmup:
            return 0
        return max(0, min(self.filter.size - 1, num_bins - 1))

    def compute_loss(self, frames, labels: np.ndarray, reset: bool = True) -> Tuple[torch.Tensor, Dict[str, torch.Tensor]]:
        """Прямой проход и составная функция потерь для батча (B, T, 2, H, W)."""
        outputs, trace = forward_sequence(self.net, frames, reset=reset)
        labels = np.asarray(labels)
        if labels.ndim == 2:
            labels = labels[None]
        start = self.first_loss_bin(outputs.shape[1])
        prediction = decode_grid(apply_filter(self.filter, outputs)[:, start:])
        target, mask = build_target_grid(labels[:, start:], dtype=outputs.dtype)
        target = target.to(outputs.device)
        mask = mask.to(outputs.device)

        masked = mask_cells(prediction, mask)
        parts = {
            "box": loss_box(masked.coords[mask], target[..., :4][mask]),
            "conf": loss_conf(prediction.confidence, target[..., 4]),
            "syn": loss_syn(trace.synops, self.loss_weights.syn_target),
        }
        total = total_loss(parts["box"], parts["conf"], parts["syn"], self.loss_weights)
        return total, parts

    def train(self, dataset: Sequence[EventFrameSequence], log_path: Optional[Union[str, Path]] = None,
              progress: bool = True) -> List[LossRecord]:
        if not dataset:
            raise DataError("Пустой обучающий набор")
        cfg = self.config
        history: List[LossRecord] = []
        self.net.train()
        self.net.reset_states()

        logger.info(f"🚀 Обучение: {cfg.iterations} итераций, батч {cfg.batch_size}, "
                    f"{len(dataset)} последовательностей, lr={cfg.lr}")

        bar = tqdm(range(cfg.iterations), desc="Обучение", disable=not progress)
        for iteration in bar:
            picks = self.rng.choice(len(dataset), size=cfg.batch_size, replace=len(dataset) < cfg.batch_size)
            frames, labels = _stack([dataset[i] for i in picks], cfg.sequence_length)

            if not cfg.reset_states:
                self.net.detach_states()
            total, parts = self.compute_loss(frames, labels, reset=cfg.reset_states)

            value = float(total.detach())
            if not math.isfinite(value):
                logger.error(f"❌ Нечисловая функция потерь на итерации {iteration}: {value}")
                raise TrainingDivergedError(iteration, value)

            self.optimizer.zero_grad()
            total.backward()
            self.optimizer.step()

            lr = self.optimizer.param_groups[0]["lr"]
            self.scheduler.step()

            record = LossRecord(iteration, value, float(parts["box"].detach()), float(parts["conf"].detach()),
                                float(torch.as_tensor(parts["syn"]).detach()), lr)
            history.append(record)
            bar.set_postfix(loss=f"{value:.4f}")
            if cfg.log_every and iteration % cfg.log_every == 0:
                logger.info(f"📊 Итерация {iteration}: loss={value:.4f} (box={record.box:.4f}, "
                            f"conf={record.conf:.4f}, syn={record.syn:.4f}), lr={lr:.2e}")

        if log_path:
            write_training_log(history, log_path)
        logger.info(f"✅ Обучение завершено: loss {history[0].total:.4f} -> {history[-1].total:.4f}")
        return history

def evaluate(net: RetinaNet, dataset: Sequence[EventFrameSequence],
             temporal_filter: Optional[TemporalFilter] = None, iou_threshold: float = 0.5,
             last_bin_only: bool = True) -> EvalResult:
    """Ошибка центроида предсказанной рамки относительно меток.

    По умолчанию берётся последний бин каждой последовательности (метка-якорь).
    """
    temporal_filter = temporal_filter or build_filter(5.0, 5.0, 20)
    was_training = net.training
    net.eval()

    errors = []
    all_boxes = []
    with torch.no_grad():
        for seq in dataset:
            outputs, _ = forward_sequence(net, seq)
            prediction = decode_grid(apply_filter(temporal_filter, outputs[0]))
            boxes = predict_boxes(prediction, iou_threshold)
            labels = seq.labels
            if last_bin_only:
                boxes, labels = boxes[-1:], labels[-1:]
            centroids = np.array([centroid(box) for box in boxes])
            errors.append(centroid_errors(centroids, labels))
            all_boxes.append(boxes)

    net.train(was_training)
    errors = np.concatenate(errors) if errors else np.zeros(0)
    mean, std = error_summary(errors)
    return EvalResult(mean, std, errors, all_boxes)

def train(net: RetinaNet, dataset: Sequence[EventFrameSequence], config: Optional[TrainConfig] = None,
          loss_weights: Optional[LossWeights] = None, temporal_filter: Optional[TemporalFilter] = None,
          seed: int = 0, iou_threshold: float = 0.5, log_path: Optional[Union[str, Path]] = None,
          progress: bool = True) -> TrainingResult:
    """Обучает сеть на хвостовом разбиении набора и валидирует на отложенной части."""
    config = config or TrainConfig()
    train_set, val_set = split_dataset(dataset, config.validation_fraction)
    trainer = Trainer(net, config, loss_weights, temporal_filter, seed)
    history = trainer.train(train_set, log_path=log_path, progress=progress)

    validation = None
    if val_set:
        validation = evaluate(net, val_set, trainer.filter, iou_threshold)
        logger.info(f"✅ Валидация: ошибка центроида {validation.mean_error:.2f} "
                    f"+- {validation.std_error:.2f} px ({validation.count} меток)")
    return TrainingResult(net, history, validation)

def write_training_log(history: Sequence[LossRecord], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(TRAIN_LOG_HEADER)
        for r in history:
            writer.writerow([r.iteration, repr(r.total), repr(r.box), repr(r.conf), repr(r.syn), repr(r.lr)])
    return path

def save_checkpoint(net: RetinaNet, output_dir: Union[str, Path]) -> Tuple[Path, Path]:
    """Чекпоинт = описание сети + файл весов."""
    output_dir = Path(output_dir)
    network_path = save_network(net.config, output_dir / "network.json")
    weights_path = save_weights(net, output_dir / "weights.bin")
    return network_path, weights_path
