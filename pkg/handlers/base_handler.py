"""Базовый обработчик подкоманд: общие шаги конвейера."""

import logging
from pathlib import Path
from typing import List, Optional, Sequence

import torch

from config.settings import ExperimentConfig
from core.exceptions import DataError, UsageError
from models.detection import TemporalFilter
from models.events import Recording
from models.frames import EventFrameSequence, SliceConfig
from models.network import NetworkConfig, retina_core_layout, retina_default, retina_tiny
from services.events import load_events, load_labels, prepare_recording
from services.readout import build_filter, identity_filter
from services.slicing import slice_dataset
from services.snn import RetinaNet, build_network, load_network, load_weights

logger = logging.getLogger(__name__)

ARCHITECTURES = {
    "default": retina_default,
    "cores": retina_core_layout,
    "tiny": retina_tiny,
}

class BaseCommandHandler:
    """Базовый класс обработчиков с загрузкой данных, сети и путями артефактов."""

    # === Пути и артефакты ===

    def output_dir(self, config: ExperimentConfig) -> Path:
        """Каталог артефактов (создаётся при необходимости)."""
        path = Path(config.paths.output_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def output_path(self, config: ExperimentConfig, explicit: Optional[str], default_name: str) -> Path:
        if explicit:
            return Path(explicit)
        return self.output_dir(config) / default_name

    def emit(self, text: str) -> None:
        """Печатает отчёт подкоманды в stdout."""
        print(text, flush=True)

    # === Загрузка данных ===

    def require(self, value: Optional[str], flag: str) -> str:
        if not value:
            raise UsageError(f"Не задан обязательный параметр {flag}")
        return value

    def load_recording(self, config: ExperimentConfig, prepare: bool = True) -> Recording:
        """Загружает события и метки; приводит поток к размеру кадра слайсера."""
        paths = config.paths
        stream = load_events(self.require(paths.events, "--events"), paths.events_format,
                             paths.sensor_width, paths.sensor_height)
        labels = load_labels(self.require(paths.labels, "--labels"))
        recording = Recording(stream, labels)

        target = (config.slicing.width, config.slicing.height)
        if prepare and stream.resolution != target:
            recording = prepare_recording(recording, config.slicing.pool_factor, config.slicing.to_square)
            if recording.stream.resolution != target:
                raise DataError(f"После подготовки поток {recording.stream.resolution}, "
                                f"а кадр слайсера {target}")
        return recording

    def build_dataset(self, config: ExperimentConfig, recording: Recording,
                      slice_config: Optional[SliceConfig] = None,
                      anchors: Optional[Sequence[int]] = None) -> List[EventFrameSequence]:
        """Последовательность на каждую метку-якорь (по умолчанию на все)."""
        slice_config = slice_config or config.slicing.to_slice_config()
        dataset = slice_dataset(recording, slice_config, anchors, jobs=config.jobs)
        if not dataset:
            raise DataError("Нет меток, для которых в потоке есть события")
        return dataset

    # === Сеть ===

    def network_config(self, config: ExperimentConfig, fallback: Optional[str] = None) -> NetworkConfig:
        """Описание сети из файла либо встроенная архитектура."""
        if config.paths.network:
            return load_network(config.paths.network)
        return ARCHITECTURES[fallback or config.train.architecture]()

    def load_model(self, config: ExperimentConfig) -> RetinaNet:
        """Сеть с весами из файла или со случайными весами от seed."""
        train = config.train
        dtype = torch.float64 if train.dtype == "float64" else torch.float32
        net = build_network(self.network_config(config), alpha=train.surrogate_alpha,
                            beta=train.surrogate_beta, reset_grad=train.reset_grad,
                            seed=config.seed, dtype=dtype)
        if config.paths.weights:
            load_weights(net, config.paths.weights)
        else:
            logger.warning("⚠️ Файл весов не задан, используются случайные веса")
        return net

    def temporal_filter(self, config: ExperimentConfig) -> TemporalFilter:
        settings = config.filter
        if not settings.enabled:
            return identity_filter()
        return build_filter(settings.tau_mem, settings.tau_syn, settings.size)

    # === Общие методы ===

    def log_interaction(self, command: str, **kwargs) -> None:
        """Логирует завершение подкоманды."""
        details = ", ".join(f"{key}={value}" for key, value in kwargs.items())
        logger.info(f"✅ {command}: {details}" if details else f"✅ {command}",
                    extra={"command": command, **kwargs})
