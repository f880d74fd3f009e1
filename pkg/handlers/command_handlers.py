"""Обработчики подкоманд конвейера."""

import argparse
import logging
from typing import Dict, List, Sequence

import numpy as np
import torch

from config.settings import ExperimentConfig
from core.exceptions import DataError, MappingInfeasibleError
from handlers.base_handler import ARCHITECTURES, BaseCommandHandler
from models.frames import EventFrameSequence, SliceConfig
from models.network import retina_core_layout, retina_default
from models.synthetic import GOLDEN_SYNTH_CONFIG
from services.events import load_events, save_events, save_labels, stream_stats
from services.hardware import assign_layers, layer_footprints, printed_footprints, validate_against_table
from services.learning.trainer import evaluate, save_checkpoint, split_dataset, train
from services.readout import apply_filter, decode_grid, predict_boxes, write_predictions_csv
from services.slicing import default_anchors, save_sequence, slice_recording
from services.snn import (RetinaNet, count_macs, count_params, firing_rate_profile, forward_sequence,
                          fuse_network, spatial_trace)
from services.synth import generate
from utils.formatters import (format_assignment, format_complexity, format_eval, format_firing_rates,
                              format_footprints, format_slice_summary, format_stats_report, format_verdicts)

logger = logging.getLogger(__name__)

DATA_OVERRIDES = {
    "events": "paths.events",
    "labels": "paths.labels",
    "events_format": "paths.events_format",
    "sensor_width": "paths.sensor_width",
    "sensor_height": "paths.sensor_height",
}
SLICE_OVERRIDES = {
    "mode": "slicing.mode",
    "n_events": "slicing.n_events",
    "dt_us": "slicing.dt_us",
    "num_bins": "slicing.num_bins",
}
MODEL_OVERRIDES = {
    "network": "paths.network",
    "weights": "paths.weights",
    "architecture": "train.architecture",
    "filter_enabled": "filter.enabled",
}

def add_data_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--events", help="файл событий (CSV t_us,x,y,p или бинарный)")
    parser.add_argument("--labels", help="файл меток зрачка (CSV t_us,x,y)")
    parser.add_argument("--format", dest="events_format", choices=["csv", "bin"], help="формат файла событий")
    parser.add_argument("--sensor-width", type=int, help="ширина сенсора для CSV")
    parser.add_argument("--sensor-height", type=int, help="высота сенсора для CSV")

def add_slice_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=["fixed", "dynamic"], help="режим нарезки")
    parser.add_argument("--n", dest="n_events", type=int, help="уникальных пикселей на динамический бин")
    parser.add_argument("--dt", dest="dt_us", type=int, help="длина фиксированного бина, мкс")
    parser.add_argument("--bins", dest="num_bins", type=int, help="число бинов T")

def add_model_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--network", help="JSON-описание сети")
    parser.add_argument("--weights", help="файл весов")
    parser.add_argument("--architecture", choices=sorted(ARCHITECTURES), help="встроенная архитектура")
    parser.add_argument("--no-filter", dest="filter_enabled", action="store_const", const=False,
                        help="без временного фильтра (единичное ядро)")

class CommandHandlers(BaseCommandHandler):
    """Подкоманды gen, stats, slice, infer, train, eval, profile, map."""

    def gen_command(self, args: argparse.Namespace, config: ExperimentConfig) -> int:
        """Синтетическая запись: события и метки."""
        synth = GOLDEN_SYNTH_CONFIG if args.golden else config.synth
        recording = generate(synth)

        fmt = config.paths.events_format
        events_path = self.output_path(config, config.paths.events, f"events.{fmt}")
        labels_path = self.output_path(config, config.paths.labels, "labels.csv")
        save_events(recording.stream, events_path, fmt)
        save_labels(recording.labels, labels_path)

        self.emit(f"🎲 {len(recording.stream)} событий -> {events_path}\n"
                  f"🎯 {len(recording.labels)} меток -> {labels_path}")
        self.log_interaction("gen", events=len(recording.stream), seed=synth.rng_seed)
        return 0

    def stats_command(self, args: argparse.Namespace, config: ExperimentConfig) -> int:
        """Статистика времён дискретизации потока."""
        paths = config.paths
        stream = load_events(self.require(paths.events, "--events"), paths.events_format,
                             paths.sensor_width, paths.sensor_height)
        report = stream_stats(stream, args.label_period)
        self.emit(format_stats_report(report))
        self.log_interaction("stats", events=report.num_events)
        return 0

    def slice_command(self, args: argparse.Namespace, config: ExperimentConfig) -> int:
        """Нарезка записи в последовательности кадров."""
        recording = self.load_recording(config)
        if args.all:
            sequences = self.build_dataset(config, recording)
            out_dir = self.output_path(config, args.out, "slices")
            for i, seq in enumerate(sequences):
                save_sequence(seq, out_dir / f"seq_{i:04d}.seq")
            target = out_dir
        else:
            sequences = [slice_recording(recording, config.slicing.to_slice_config(), args.anchor)]
            target = save_sequence(sequences[0], self.output_path(config, args.out, "sequence.seq"))

        self.emit(format_slice_summary(sequences) + f"\n💾 -> {target}")
        self.log_interaction("slice", sequences=len(sequences), mode=config.slicing.mode)
        return 0

    def infer_command(self, args: argparse.Namespace, config: ExperimentConfig) -> int:
        """Предсказания по бинам одной последовательности и профиль спайков."""
        recording = self.load_recording(config)
        sequence = slice_recording(recording, config.slicing.to_slice_config(), args.anchor)
        net = self.load_model(config)
        if args.fuse:
            net = fuse_network(net)
        net.eval()

        with torch.no_grad():
            outputs, trace = forward_sequence(net, sequence)
            prediction = decode_grid(apply_filter(self.temporal_filter(config), outputs[0]))
        boxes = predict_boxes(prediction, config.iou_threshold)

        path = write_predictions_csv(boxes, self.output_path(config, args.out, "predictions.csv"))
        self.emit(format_firing_rates({"rate": firing_rate_profile(trace)}) + f"\n💾 -> {path}")
        self.log_interaction("infer", bins=len(boxes))
        return 0

    def train_command(self, args: argparse.Namespace, config: ExperimentConfig) -> int:
        """Обучение с отложенной валидацией и чекпоинтом."""
        recording = self.load_recording(config)
        dataset = self.build_dataset(config, recording)
        net = self.load_model(config)
        out_dir = self.output_dir(config)

        result = train(net, dataset, config.train, config.loss, self.temporal_filter(config),
                       seed=config.seed, iou_threshold=config.iou_threshold,
                       log_path=out_dir / "train_log.csv", progress=not args.quiet)
        network_path, weights_path = save_checkpoint(result.net, out_dir)

        lines = [f"📉 loss: {result.losses[0]:.4f} -> {result.losses[-1]:.4f}"]
        if result.validation is not None:
            lines.append(format_eval(result.validation))
        lines.append(f"💾 -> {network_path}, {weights_path}")
        self.emit("\n".join(lines))
        self.log_interaction("train", iterations=len(result.history))
        return 0

    def eval_command(self, args: argparse.Namespace, config: ExperimentConfig) -> int:
        """Средняя ошибка центроида по записи."""
        recording = self.load_recording(config)
        dataset = self.build_dataset(config, recording)
        if args.validation_only:
            _, dataset = split_dataset(dataset, config.train.validation_fraction)
            if not dataset:
                raise DataError("Отложенная часть пуста: слишком мало меток")
        net = self.load_model(config)

        result = evaluate(net, dataset, self.temporal_filter(config), config.iou_threshold)
        self.emit(format_eval(result))
        self.log_interaction("eval", mean_error=round(result.mean_error, 4))
        return 0

    def profile_command(self, args: argparse.Namespace, config: ExperimentConfig) -> int:
        """Частоты спайков при фиксированной и динамической нарезке.

        N динамического окна равно среднему числу активных пикселей
        в непустых бинах фиксированной нарезки.
        """
        recording = self.load_recording(config)
        net = self.load_model(config)
        anchors = default_anchors(recording)[-args.max_sequences:]
        s = config.slicing

        fixed = self.build_dataset(config, recording, SliceConfig.fixed(s.dt_us, s.num_bins, s.height, s.width),
                                   anchors)
        n_events = matched_event_count(fixed)
        dynamic = self.build_dataset(config, recording,
                                     SliceConfig.dynamic(n_events, s.num_bins, s.height, s.width), anchors)

        profiles = {
            f"fixed dt={s.dt_us}": sequence_firing_rates(net, fixed),
            f"dynamic N={n_events}": sequence_firing_rates(net, dynamic),
        }
        self.emit(format_firing_rates(profiles))
        self.log_interaction("profile", n_events=n_events, sequences=len(fixed))
        return 0

    def map_command(self, args: argparse.Namespace, config: ExperimentConfig) -> int:
        """Отчёт о памяти слоёв и размещение по ядрам."""
        net = self.network_config(config, fallback=args.architecture)
        self.emit(format_complexity(net, spatial_trace(net), count_params(net), count_macs(net)))

        footprints = layer_footprints(net)
        result = assign_layers(footprints)
        self.emit(format_footprints("\n📐 Рассчитанные требования", footprints, result.domains))

        if net.name in (retina_default().name, retina_core_layout().name):
            self.emit("\n" + format_verdicts(validate_against_table(footprints)))
            printed = printed_footprints()
            printed_result = assign_layers(printed)
            self.emit(format_footprints("\n📐 Напечатанная таблица (столбцы переставлены)",
                                        printed, printed_result.domains))
            self.emit(format_assignment(printed_result, "По напечатанной таблице:"))

        self.emit(format_assignment(result, "\nПо рассчитанным требованиям:"))
        self.log_interaction("map", feasible=result.feasible)
        if not result.feasible:
            raise MappingInfeasibleError(result.conflict)
        return 0

    # === Регистрация ===

    def commands(self) -> List[dict]:
        """Описания подкоманд для реестра."""
        return [
            dict(name="gen", handler=self.gen_command, help="сгенерировать синтетическую запись",
                 add_arguments=_gen_arguments,
                 overrides={**DATA_OVERRIDES, "duration_us": "synth.duration_us",
                            "trajectory": "synth.trajectory", "speed": "synth.speed"}),
            dict(name="stats", handler=self.stats_command, help="статистика потока событий",
                 add_arguments=_stats_arguments, overrides=DATA_OVERRIDES),
            dict(name="slice", handler=self.slice_command, help="нарезать запись на бины",
                 add_arguments=_slice_arguments, overrides={**DATA_OVERRIDES, **SLICE_OVERRIDES}),
            dict(name="infer", handler=self.infer_command, help="предсказания и частоты спайков",
                 add_arguments=_infer_arguments,
                 overrides={**DATA_OVERRIDES, **SLICE_OVERRIDES, **MODEL_OVERRIDES}),
            dict(name="train", handler=self.train_command, help="обучить сеть",
                 add_arguments=_train_arguments,
                 overrides={**DATA_OVERRIDES, **SLICE_OVERRIDES, **MODEL_OVERRIDES,
                            "iterations": "train.iterations", "batch_size": "train.batch_size",
                            "lr": "train.lr", "reset_states": "train.reset_states"}),
            dict(name="eval", handler=self.eval_command, help="ошибка центроида по записи",
                 add_arguments=_eval_arguments,
                 overrides={**DATA_OVERRIDES, **SLICE_OVERRIDES, **MODEL_OVERRIDES}),
            dict(name="profile", handler=self.profile_command, help="частоты спайков: фиксированные и динамические окна",
                 add_arguments=_profile_arguments,
                 overrides={**DATA_OVERRIDES, **MODEL_OVERRIDES, "dt_us": "slicing.dt_us",
                            "num_bins": "slicing.num_bins"}),
            dict(name="map", handler=self.map_command, help="размещение слоёв по ядрам",
                 add_arguments=_map_arguments, overrides={"network": "paths.network"}),
        ]

def matched_event_count(sequences: Sequence[EventFrameSequence]) -> int:
    """Среднее число активных пикселей в непустых бинах, не меньше 1."""
    active = [seq.active_pixels()[seq.padded_bins:] for seq in sequences]
    active = np.concatenate(active) if active else np.zeros(0)
    active = active[active > 0]
    if active.size == 0:
        raise DataError("В фиксированных бинах нет событий")
    return max(1, int(round(float(active.mean()))))

def sequence_firing_rates(net: RetinaNet, sequences: Sequence[EventFrameSequence]) -> Dict[int, float]:
    """Частоты спайков по слоям для батча последовательностей одной формы."""
    frames = np.stack([seq.frames for seq in sequences])
    was_training = net.training
    net.eval()
    with torch.no_grad():
        _, trace = forward_sequence(net, frames)
    net.train(was_training)
    return firing_rate_profile(trace)

def _gen_arguments(parser: argparse.ArgumentParser) -> None:
    add_data_arguments(parser)
    parser.add_argument("--golden", action="store_true", help="фиксированная эталонная конфигурация")
    parser.add_argument("--duration-us", type=int, help="длительность записи, мкс")
    parser.add_argument("--trajectory", choices=["circular", "random-walk"], help="траектория зрачка")
    parser.add_argument("--speed", type=float, help="скорость, пикселей в секунду")

def _stats_arguments(parser: argparse.ArgumentParser) -> None:
    add_data_arguments(parser)
    parser.add_argument("--label-period", type=int, help="период меток, мкс (события на период)")

def _slice_arguments(parser: argparse.ArgumentParser) -> None:
    add_data_arguments(parser)
    add_slice_arguments(parser)
    parser.add_argument("--anchor", type=int, default=-1, help="индекс метки-якоря")
    parser.add_argument("--all", action="store_true", help="по последовательности на каждую метку")
    parser.add_argument("--out", help="файл или каталог результата")

def _infer_arguments(parser: argparse.ArgumentParser) -> None:
    add_data_arguments(parser)
    add_slice_arguments(parser)
    add_model_arguments(parser)
    parser.add_argument("--anchor", type=int, default=-1, help="индекс метки-якоря")
    parser.add_argument("--fuse", action="store_true", help="слить BN со свёртками перед выводом")
    parser.add_argument("--out", help="CSV предсказаний")

def _train_arguments(parser: argparse.ArgumentParser) -> None:
    add_data_arguments(parser)
    add_slice_arguments(parser)
    add_model_arguments(parser)
    parser.add_argument("--iterations", type=int, help="число итераций")
    parser.add_argument("--batch-size", type=int, help="размер батча")
    parser.add_argument("--lr", type=float, help="скорость обучения")
    parser.add_argument("--no-reset", dest="reset_states", action="store_const", const=False,
                        help="не сбрасывать состояния нейронов между итерациями")
    parser.add_argument("--quiet", action="store_true", help="без индикатора прогресса")

def _eval_arguments(parser: argparse.ArgumentParser) -> None:
    add_data_arguments(parser)
    add_slice_arguments(parser)
    add_model_arguments(parser)
    parser.add_argument("--validation-only", action="store_true", help="только отложенный хвост меток")

def _profile_arguments(parser: argparse.ArgumentParser) -> None:
    add_data_arguments(parser)
    add_model_arguments(parser)
    parser.add_argument("--dt", dest="dt_us", type=int, help="длина фиксированного бина, мкс")
    parser.add_argument("--bins", dest="num_bins", type=int, help="число бинов T")
    parser.add_argument("--max-sequences", type=int, default=8, help="последних меток-якорей в профиле")

def _map_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--network", help="JSON-описание сети (по умолчанию встроенная retina-cores)")
    parser.add_argument("--architecture", choices=sorted(ARCHITECTURES), default="cores",
                        help="встроенная архитектура без --network")
