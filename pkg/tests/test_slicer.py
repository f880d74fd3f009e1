"""Тесты нарезки событий: динамические и фиксированные окна."""

import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.exceptions import DataError
from models.events import EventStream, PupilLabel, Recording
from models.frames import SliceConfig
from services.slicing import (interpolate_label, load_sequence, resolve_polarity, save_sequence,
                              slice_dataset, slice_dynamic, slice_fixed, slice_recording)

def make_recording(t, x, y, p, size=64, labels=None) -> Recording:
    stream = EventStream(size, size, np.array(t, dtype=np.int64), np.array(x), np.array(y), np.array(p))
    if labels is None:
        end = int(stream.t[-1]) if len(stream) else 0
        labels = [PupilLabel(0, 1.0, 1.0), PupilLabel(end + 1, 2.0, 2.0)]
    return Recording(stream, labels)

def random_recording(rng, size, n_events, duration=5000) -> Recording:
    t = np.sort(rng.integers(0, duration, n_events))
    # узкое поле, чтобы пиксели часто повторялись
    span = int(rng.integers(2, size + 1))
    x = rng.integers(0, span, n_events)
    y = rng.integers(0, span, n_events)
    p = rng.integers(0, 2, n_events)
    labels = [PupilLabel(0, 1.0, 1.0), PupilLabel(duration, 3.0, 4.0)]
    return make_recording(t, x, y, p, size, labels)

# === Эталон: построчная реализация алгоритма нарезки ===

def last_unique_evs(xy, n):
    """Хвост событий с ровно n разными пикселями; None, если пикселей меньше n."""
    seen = set()
    k = len(xy)
    while k > 0:
        pixel = (int(xy[k - 1][0]), int(xy[k - 1][1]))
        if pixel not in seen and len(seen) == n:
            break
        seen.add(pixel)
        k -= 1
    if len(seen) < n:
        return None
    return xy[k:]

def oracle_dynamic(rec: Recording, n, num_bins, size, anchor_time):
    stream = rec.stream
    xyp = [(int(x), int(y), int(p)) for t, x, y, p in zip(stream.t, stream.x, stream.y, stream.p)
           if t <= anchor_time]
    end_index = len(xyp)
    tcwh = np.zeros((num_bins, 2, size, size), dtype=np.int64)
    for i in reversed(range(num_bins)):
        window = last_unique_evs([e[:2] for e in xyp[:end_index]], n)
        if window is None:
            break
        start_index = end_index - len(window)
        chunk = np.array(xyp[start_index:end_index])
        x, y, p = chunk[:, 0], chunk[:, 1], chunk[:, 2]
        np.add.at(tcwh[i, 0], (y[p == 0], x[p == 0]), 1)
        np.add.at(tcwh[i, 1], (y[p == 1], x[p == 1]), 1)
        tcwh[i, 0][tcwh[i, 1] >= tcwh[i, 0]] = 0
        tcwh[i, 1][tcwh[i, 1] < tcwh[i, 0]] = 0
        tcwh[i] = tcwh[i].clip(0, 1)
        end_index = start_index
    return tcwh

def oracle_fixed(rec: Recording, dt, num_bins, size, anchor_time):
    tcwh = np.zeros((num_bins, 2, size, size), dtype=np.int64)
    for t, x, y, p in zip(rec.stream.t, rec.stream.x, rec.stream.y, rec.stream.p):
        for i in range(num_bins):
            end = anchor_time - (num_bins - 1 - i) * dt
            if end - dt < t <= end:
                tcwh[i, int(p), int(y), int(x)] += 1
    for i in range(num_bins):
        tcwh[i, 0][tcwh[i, 1] >= tcwh[i, 0]] = 0
        tcwh[i, 1][tcwh[i, 1] < tcwh[i, 0]] = 0
    return tcwh.clip(0, 1)

def active_counts(frames: np.ndarray) -> np.ndarray:
    return (frames.sum(axis=1) > 0).sum(axis=(1, 2))

# === Полярность ===

@pytest.mark.parametrize("on,off,expected", [
    (2, 1, (1, 0)),
    (0, 0, (0, 0)),
    (1, 1, (1, 0)),
    (1, 3, (0, 1)),
])
def test_resolve_polarity(on, off, expected):
    on_bit, off_bit = resolve_polarity(np.array([on]), np.array([off]))
    assert (int(on_bit[0]), int(off_bit[0])) == expected

def test_resolve_polarity_rejects_negative():
    with pytest.raises(DataError):
        resolve_polarity(np.array([-1]), np.array([0]))

# === Динамическая нарезка ===

def test_exact_fit_single_bin():
    rec = make_recording([0, 1, 2, 3, 4], [0, 1, 2, 3, 4], [0] * 5, [1] * 5)
    seq = slice_dynamic(rec, SliceConfig.dynamic(5, num_bins=1))
    assert active_counts(seq.frames).tolist() == [5]
    assert seq.padded_bins == 0

def test_repeated_pixel_extends_window():
    # пиксели [A, A, B], новейший последний
    rec = make_recording([0, 1, 2], [3, 3, 7], [4, 4, 9], [0, 0, 1])
    seq = slice_dynamic(rec, SliceConfig.dynamic(2, num_bins=1))
    assert seq.frames[0, 0, 4, 3] == 1
    assert seq.frames[0, 1, 9, 7] == 1
    assert seq.frames.sum() == 2

def test_window_stops_before_next_unique_pixel():
    # старейшее событие C не должно попасть в бин с N=2
    rec = make_recording([0, 1, 2, 3], [5, 3, 3, 7], [5, 4, 4, 9], [1, 0, 0, 1])
    seq = slice_dynamic(rec, SliceConfig.dynamic(2, num_bins=2))
    assert seq.frames[1, :, 5, 5].sum() == 0
    assert seq.padded_bins == 1
    assert not seq.frames[0].any()

def test_exhausted_stream_pads_earliest_bins():
    rec = make_recording([0, 1, 2, 3], [0, 1, 2, 3], [0] * 4, [1] * 4)
    seq = slice_dynamic(rec, SliceConfig.dynamic(2, num_bins=4))
    assert seq.padded_bins == 2
    assert active_counts(seq.frames).tolist() == [0, 0, 2, 2]
    assert np.all(np.diff(seq.bin_end_times) > 0)

def test_events_after_anchor_ignored():
    rec = make_recording([0, 1, 10], [0, 1, 2], [0, 0, 0], [1, 1, 1],
                         labels=[PupilLabel(0, 1.0, 1.0), PupilLabel(5, 1.0, 1.0), PupilLabel(20, 1.0, 1.0)])
    seq = slice_dynamic(rec, SliceConfig.dynamic(2, num_bins=1), anchor_label_index=1)
    assert seq.frames[0, 1, 0, 2] == 0
    assert seq.bin_end_times.tolist() == [1]

def test_dynamic_matches_oracle_on_random_corpus():
    rng = np.random.default_rng(2024)
    size = 16
    checked_bins = 0
    for _ in range(1000):
        rec = random_recording(rng, size, int(rng.integers(1, 200)))
        n = int(rng.integers(1, 12))
        num_bins = int(rng.integers(1, 6))
        anchor = int(rng.integers(0, len(rec.labels)))
        cfg = SliceConfig.dynamic(n, num_bins=num_bins, height=size, width=size)

        seq = slice_dynamic(rec, cfg, anchor)
        expected = oracle_dynamic(rec, n, num_bins, size, rec.labels[anchor].t)
        np.testing.assert_array_equal(seq.frames, expected)

        # ровно N активных пикселей в каждом непустом бине
        counts = active_counts(seq.frames)
        assert np.all(counts[seq.padded_bins:] == n)
        assert np.all(counts[:seq.padded_bins] == 0)
        # эксклюзивность каналов
        assert not np.any(seq.frames[:, 0] & seq.frames[:, 1])
        assert np.all(np.diff(seq.bin_end_times) > 0)
        checked_bins += num_bins - seq.padded_bins
    assert checked_bins > 300

# === Фиксированная нарезка ===

def test_fixed_interval_membership():
    labels = [PupilLabel(0, 1.0, 1.0), PupilLabel(5000, 1.0, 1.0)]
    rec = make_recording([3500, 4500], [1, 2], [1, 2], [1, 0], labels=labels)
    seq = slice_fixed(rec, SliceConfig.fixed(1000, num_bins=4))
    assert seq.frames[3, 0, 2, 2] == 1
    assert seq.frames[2, 1, 1, 1] == 1
    assert seq.frames[3].sum() == 1 and seq.frames[2].sum() == 1
    assert not seq.frames[:2].any()
    assert seq.bin_end_times.tolist() == [2000, 3000, 4000, 5000]

def test_fixed_bins_are_half_open():
    labels = [PupilLabel(0, 1.0, 1.0), PupilLabel(5000, 1.0, 1.0)]
    rec = make_recording([4000, 5000], [1, 2], [1, 2], [1, 1], labels=labels)
    seq = slice_fixed(rec, SliceConfig.fixed(1000, num_bins=2))
    assert seq.frames[1, 1, 2, 2] == 1 and seq.frames[1].sum() == 1
    assert seq.frames[0, 1, 1, 1] == 1

def test_fixed_zero_dt_rejected():
    with pytest.raises(DataError):
        SliceConfig.fixed(0)

def test_fixed_matches_oracle():
    rng = np.random.default_rng(7)
    size = 8
    for _ in range(200):
        rec = random_recording(rng, size, int(rng.integers(1, 150)))
        dt = int(rng.integers(1, 800))
        num_bins = int(rng.integers(1, 8))
        anchor = int(rng.integers(0, len(rec.labels)))
        cfg = SliceConfig.fixed(dt, num_bins=num_bins, height=size, width=size)
        seq = slice_fixed(rec, cfg, anchor)
        np.testing.assert_array_equal(seq.frames, oracle_fixed(rec, dt, num_bins, size, rec.labels[anchor].t))
        assert not np.any(seq.frames[:, 0] & seq.frames[:, 1])

def test_fixed_counts_vary_with_rate_dynamic_do_not():
    rng = np.random.default_rng(11)
    rate = 0.05  # событий в мкс
    duration = 200_000
    n = rng.poisson(rate * duration)
    t = np.sort(rng.integers(0, duration, n))
    rec = make_recording(t, rng.integers(0, 64, n), rng.integers(0, 64, n), rng.integers(0, 2, n),
                         labels=[PupilLabel(0, 1.0, 1.0), PupilLabel(duration, 1.0, 1.0)])

    fixed = slice_fixed(rec, SliceConfig.fixed(1000, num_bins=64))
    counts = active_counts(fixed.frames)
    assert counts.mean() == pytest.approx(rate * 1000, abs=3)
    assert counts.std() > 0

    dynamic = slice_dynamic(rec, SliceConfig.dynamic(50, num_bins=64))
    assert set(active_counts(dynamic.frames).tolist()) == {50}

# === Метки, конфигурация, набор ===

def test_interpolate_label_examples():
    labels = [PupilLabel(0, 10.0, 0.0), PupilLabel(100, 20.0, 0.0)]
    assert interpolate_label(labels, 50).x == pytest.approx(15.0)
    assert interpolate_label(labels, 25).x == pytest.approx(12.5)
    assert interpolate_label(labels, 0) == labels[0]
    assert interpolate_label(labels, 500).x == 20.0

def test_labels_interpolated_at_bin_ends():
    labels = [PupilLabel(0, 0.0, 0.0), PupilLabel(4000, 40.0, 20.0)]
    rec = make_recording([100, 2100], [1, 2], [1, 2], [1, 1], labels=labels)
    seq = slice_fixed(rec, SliceConfig.fixed(1000, num_bins=4))
    np.testing.assert_allclose(seq.labels[:, 0], [10.0, 20.0, 30.0, 40.0])
    np.testing.assert_allclose(seq.labels[:, 1], [5.0, 10.0, 15.0, 20.0])

def test_resolution_mismatch_rejected():
    rec = make_recording([0], [0], [0], [1], size=32)
    with pytest.raises(DataError):
        slice_recording(rec, SliceConfig.dynamic(1))

def test_invalid_configs():
    with pytest.raises(DataError):
        SliceConfig.dynamic(0)
    with pytest.raises(DataError):
        SliceConfig.dynamic(5, num_bins=0)

def test_slice_dataset_parallel_equals_serial():
    rng = np.random.default_rng(3)
    t = np.sort(rng.integers(0, 10_000, 3000))
    t[0] = 0
    labels = [PupilLabel(k * 1000, 10.0 + k, 20.0) for k in range(11)]
    rec = make_recording(t, rng.integers(0, 64, 3000), rng.integers(0, 64, 3000), rng.integers(0, 2, 3000),
                         labels=labels)
    cfg = SliceConfig.dynamic(20, num_bins=8)
    serial = slice_dataset(rec, cfg, jobs=1)
    parallel = slice_dataset(rec, cfg, jobs=4)
    assert len(serial) == len(parallel) == 11
    for a, b in zip(serial, parallel):
        np.testing.assert_array_equal(a.frames, b.frames)
        np.testing.assert_array_equal(a.bin_end_times, b.bin_end_times)

def test_sequence_file_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    rec = random_recording(rng, 64, 500)
    seq = slice_dynamic(rec, SliceConfig.dynamic(10, num_bins=8))
    loaded = load_sequence(save_sequence(seq, tmp_path / "seq.seq"))
    np.testing.assert_array_equal(loaded.frames, seq.frames)
    np.testing.assert_array_equal(loaded.bin_end_times, seq.bin_end_times)
    np.testing.assert_allclose(loaded.labels, seq.labels)
    assert loaded.padded_bins == seq.padded_bins

def test_corrupted_sequence_file(tmp_path):
    path = tmp_path / "seq.seq"
    path.write_bytes(b'{"shape": [1, 2, 2, 2]}\n\x00\x01')
    with pytest.raises(DataError):
        load_sequence(path)

if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
