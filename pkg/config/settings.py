# config/settings.py
"""Центральная конфигурация эксперимента."""

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import yaml
from dotenv import load_dotenv

from core.exceptions import ConfigError
from models.frames import SliceConfig
from models.synthetic import SynthConfig

load_dotenv()

@dataclass
class PathsConfig:
    """Пути к входным данным и артефактам."""
    events: Optional[str] = None
    labels: Optional[str] = None
    network: Optional[str] = None
    weights: Optional[str] = None
    output_dir: str = "output"
    events_format: str = "csv"  # csv, bin
    sensor_width: int = 640
    sensor_height: int = 480

@dataclass
class SliceSettings:
    """Настройки нарезки событий на временные бины."""
    mode: str = "dynamic"  # dynamic, fixed
    n_events: int = 300
    dt_us: int = 3000
    num_bins: int = 64
    height: int = 64
    width: int = 64
    pool_factor: int = 8
    to_square: bool = True  # 640x480 -> 512x512 перед пулингом

    def to_slice_config(self) -> SliceConfig:
        """Строит SliceConfig для слайсера."""
        if self.mode == "dynamic":
            return SliceConfig.dynamic(self.n_events, num_bins=self.num_bins,
                                       height=self.height, width=self.width)
        if self.mode == "fixed":
            return SliceConfig.fixed(self.dt_us, num_bins=self.num_bins,
                                     height=self.height, width=self.width)
        raise ConfigError(f"Неизвестный режим нарезки: {self.mode}")

@dataclass
class FilterSettings:
    """Параметры временного фильтра взвешенной суммы."""
    tau_mem: float = 5.0
    tau_syn: float = 5.0
    size: int = 20
    enabled: bool = True

@dataclass
class LossWeights:
    """Веса компонент функции потерь."""
    lambda_box: float = 7.5
    lambda_conf: float = 1.5
    lambda_syn: float = 1e-7
    syn_target: float = 1e6

@dataclass
class TrainConfig:
    """Гиперпараметры обучения."""
    iterations: int = 576
    batch_size: int = 16
    sequence_length: int = 64
    lr: float = 1e-3
    lr_step: int = 64
    lr_gamma: float = 0.8
    adam_betas: Tuple[float, float] = (0.9, 0.999)
    surrogate_alpha: float = 1.0
    surrogate_beta: float = 10.0
    reset_states: bool = True
    reset_grad: str = "stop"  # stop, pass
    skip_filter_warmup: bool = True  # потери только на бинах с полным окном фильтра
    validation_fraction: float = 0.2
    architecture: str = "tiny"  # tiny, default, cores
    dtype: str = "float32"
    log_every: int = 10

@dataclass
class ExperimentConfig:
    """Основная конфигурация эксперимента."""
    paths: PathsConfig = field(default_factory=PathsConfig)
    slicing: SliceSettings = field(default_factory=SliceSettings)
    filter: FilterSettings = field(default_factory=FilterSettings)
    loss: LossWeights = field(default_factory=LossWeights)
    train: TrainConfig = field(default_factory=TrainConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)
    seed: int = 0
    jobs: int = 1
    iou_threshold: float = 0.5
    debug: bool = False
    log_level: str = "INFO"
    log_dir: str = "logs"

    def validate(self) -> None:
        """Проверяет согласованность значений."""
        positive = {
            "train.iterations": self.train.iterations,
            "train.batch_size": self.train.batch_size,
            "train.sequence_length": self.train.sequence_length,
            "train.lr_step": self.train.lr_step,
            "train.surrogate_alpha": self.train.surrogate_alpha,
            "train.surrogate_beta": self.train.surrogate_beta,
            "filter.tau_mem": self.filter.tau_mem,
            "filter.tau_syn": self.filter.tau_syn,
            "filter.size": self.filter.size,
            "slicing.num_bins": self.slicing.num_bins,
            "slicing.pool_factor": self.slicing.pool_factor,
            "jobs": self.jobs,
        }
        for key, value in positive.items():
            if value <= 0:
                raise ConfigError(f"{key} должен быть положительным, получено {value}")

        if self.train.batch_size < 2:
            raise ConfigError(f"train.batch_size должен быть не меньше 2 для BatchNorm, получено {self.train.batch_size}")

        if self.train.lr < 0:
            raise ConfigError(f"train.lr не может быть отрицательным: {self.train.lr}")
        if not 0.0 < self.train.lr_gamma <= 1.0:
            raise ConfigError(f"train.lr_gamma вне (0, 1]: {self.train.lr_gamma}")
        if not 0.0 <= self.train.validation_fraction < 1.0:
            raise ConfigError(f"train.validation_fraction вне [0, 1): {self.train.validation_fraction}")
        if self.train.reset_grad not in ("stop", "pass"):
            raise ConfigError(f"train.reset_grad: ожидается stop или pass, получено {self.train.reset_grad}")
        if self.train.architecture not in ("tiny", "default", "cores"):
            raise ConfigError(f"train.architecture: неизвестная архитектура {self.train.architecture}")
        if self.train.dtype not in ("float32", "float64"):
            raise ConfigError(f"train.dtype: {self.train.dtype}")
        if self.paths.events_format not in ("csv", "bin"):
            raise ConfigError(f"paths.events_format: {self.paths.events_format}")

        for key, value in dataclasses.asdict(self.loss).items():
            if value < 0:
                raise ConfigError(f"loss.{key} не может быть отрицательным: {value}")

        # Проверка режима нарезки происходит при построении SliceConfig
        try:
            self.slicing.to_slice_config()
        except ValueError as e:
            raise ConfigError(str(e)) from e

def _coerce(current: Any, value: Any, key: str) -> Any:
    """Приводит значение из файла или CLI к типу поля."""
    if value is None:
        return None
    if isinstance(current, bool):
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)
    try:
        if isinstance(current, int):
            return int(value)
        if isinstance(current, float):
            return float(value)
        if isinstance(current, tuple):
            return tuple(type(c)(v) for c, v in zip(current, value))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{key}: не удалось привести {value!r}") from e
    return value

def _apply_section(section: Any, values: Mapping[str, Any], prefix: str) -> Any:
    """Возвращает копию dataclass-секции с переопределёнными полями."""
    known = {f.name for f in dataclasses.fields(section)}
    updates: Dict[str, Any] = {}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"Неизвестный параметр: {prefix}{key}")
        current = getattr(section, key)
        if dataclasses.is_dataclass(current):
            if not isinstance(value, Mapping):
                raise ConfigError(f"{prefix}{key}: ожидается секция")
            updates[key] = _apply_section(current, value, f"{prefix}{key}.")
        else:
            updates[key] = _coerce(current, value, f"{prefix}{key}")
    return dataclasses.replace(section, **updates)

def _env_overrides() -> Dict[str, Any]:
    """Собирает переопределения из переменных окружения."""
    env_map = {
        "LOG_LEVEL": "log_level",
        "DEBUG": "debug",
        "RETINA_SEED": "seed",
        "RETINA_JOBS": "jobs",
        "RETINA_OUTPUT_DIR": "paths.output_dir",
        "RETINA_LOG_DIR": "log_dir",
        "RETINA_SLICE_MODE": "slicing.mode",
        "RETINA_TRAIN_ITERATIONS": "train.iterations",
    }
    overrides: Dict[str, Any] = {}
    for env_name, key in env_map.items():
        value = os.getenv(env_name)
        if value is not None and value != "":
            overrides[key] = value
    return overrides

def _nest(flat: Mapping[str, Any]) -> Dict[str, Any]:
    """Превращает {'a.b': 1} в {'a': {'b': 1}}."""
    nested: Dict[str, Any] = {}
    for dotted, value in flat.items():
        parts = dotted.split(".")
        node = nested
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return nested

def load_config(config_path: Optional[str] = None,
                overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """Загружает конфигурацию: умолчания < окружение < YAML-файл < флаги CLI."""
    config = ExperimentConfig()
    config = _apply_section(config, _nest(_env_overrides()), "")

    if config_path:
        path = Path(config_path)
        if not path.exists():
            raise ConfigError(f"Файл конфигурации не найден: {path}")
        try:
            with open(path, encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Ошибка разбора {path}: {e}") from e
        if not isinstance(data, Mapping):
            raise ConfigError(f"{path}: ожидается словарь верхнего уровня")
        config = _apply_section(config, data, "")

    if overrides:
        cleaned = {k: v for k, v in overrides.items() if v is not None}
        config = _apply_section(config, _nest(cleaned), "")

    config.log_level = str(config.log_level).upper()
    config.validate()
    return config
