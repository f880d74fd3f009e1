"""Форматирование текстовых отчётов подкоманд."""

import math
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np

def _cell(value: Any) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.4g}" if abs(value) >= 1e4 or (value != 0 and abs(value) < 1e-2) else f"{value:.2f}"
    if isinstance(value, (set, frozenset)):
        return "{" + ",".join(str(v) for v in sorted(value)) + "}" if value else "-"
    if value is None:
        return "-"
    return str(value)

def format_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """Таблица с выравниванием по ширине столбцов."""
    cells = [[_cell(v) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for i, value in enumerate(row):
            widths[i] = max(widths[i], len(value))

    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        lines.append("  ".join(value.rjust(w) for value, w in zip(row, widths)))
    return "\n".join(lines)

def format_stats_report(report) -> str:
    """Отчёт по потоку в виде таблицы медиана/среднее/СКО/мин/макс."""
    lines = [f"📊 Поток: {report.num_events} событий, длительность {report.duration_us} мкс\n"]
    rows = [
        ["sampling time, us", *_summary(report.sampling_time_us)],
        ["events / timestamp", *_summary(report.events_per_timestamp)],
    ]
    if report.events_per_label_period is not None:
        rows.append([f"events / {report.label_period_us} us", *_summary(report.events_per_label_period)])
    lines.append(format_table(["", "median", "mean", "std", "min", "max"], rows))
    return "\n".join(lines)

def _summary(stats) -> List[float]:
    return [stats.median, stats.mean, stats.std, stats.min, stats.max]

def format_slice_summary(sequences) -> str:
    """Число активных пикселей в непустых бинах нарезанных последовательностей."""
    active = [seq.active_pixels()[seq.padded_bins:] for seq in sequences]
    active = np.concatenate(active) if active else np.zeros(0)
    padded = sum(seq.padded_bins for seq in sequences)
    lines = [f"🎞️ Последовательностей: {len(sequences)}, дополненных бинов: {padded}"]
    if active.size:
        lines.append(f"  активных пикселей на бин: min={int(active.min())}, "
                     f"max={int(active.max())}, mean={float(active.mean()):.2f}")
    return "\n".join(lines)

def format_complexity(net, trace, params: int, macs: int) -> str:
    """Пространственная трасса сети и её сложность."""
    rows = [[entry.layer_index, entry.kind, entry.channels, f"{entry.f_x}x{entry.f_y}"] for entry in trace]
    lines = [
        f"🧠 Сеть {net.name}: вход {tuple(net.input_shape)}",
        format_table(["#", "kind", "channels", "map"], rows),
        f"\nПараметры: {params}",
        f"MAC на проход: {macs}",
    ]
    return "\n".join(lines)

def format_footprints(title: str, footprints, domains: Mapping[int, frozenset]) -> str:
    """Требования слоёв к памяти и совместимые ядра."""
    rows = []
    for fp in footprints:
        pow2 = fp.kernel_entries_pow2 / 1024 if fp.kernel_entries_pow2 is not None else None
        rows.append([fp.layer_id, fp.kernel_ki, pow2, fp.neuron_ki, domains.get(fp.layer_id, frozenset())])
    return f"{title}\n" + format_table(["layer", "kernel Ki", "kernel 2^n Ki", "neuron Ki", "cores"], rows)

def format_verdicts(verdicts) -> str:
    """Сверка с напечатанной таблицей по слоям."""
    rows = [
        [v.layer_id, v.printed.n_m_ki, v.printed.k_mt_ki, v.kernel_match, v.neuron_match,
         v.verdict.value, "yes" if v.cores_match else "no"]
        for v in verdicts
    ]
    headers = ["layer", "N_M printed", "K_MT printed", "kernel", "neuron", "verdict", "cores match"]
    return "📋 Сверка с таблицей архитектуры\n" + format_table(headers, rows)

def format_assignment(result, title: Optional[str] = None) -> str:
    """Найденное размещение или конфликтующее подмножество."""
    lines = [title] if title else []
    if result.feasible:
        lines.append("✅ Размещение найдено:")
        for layer, core in result.assignment.items():
            lines.append(f"  слой {layer} -> ядро {core}")
    else:
        lines.append(f"❌ Размещение невозможно, конфликт: слои {result.conflict}")
    return "\n".join(lines)

def format_firing_rates(profiles: Dict[str, Dict[int, float]]) -> str:
    """Частоты спайков по IF-слоям для нескольких режимов."""
    names = list(profiles)
    layer_ids = sorted({layer for profile in profiles.values() for layer in profile})
    rows = [[layer, *[profiles[name].get(layer, math.nan) for name in names]] for layer in layer_ids]
    return "🔥 Частота спайков (спайков на нейрон за шаг)\n" + format_table(["layer", *names], rows)

def format_eval(result) -> str:
    return (f"🎯 Ошибка центроида: {result.mean_error:.2f} +- {result.std_error:.2f} px "
            f"({result.count} меток)")
