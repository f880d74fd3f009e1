"""Тесты обучения: суррогатный градиент, функции потерь, метрики, цикл обучения."""

import csv
import math
import os
import sys

import numpy as np
import pytest
import torch
import torch.nn.functional as F
from torch import nn

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.settings import LossWeights, TrainConfig
from core.exceptions import DataError, TrainingDivergedError
from models.frames import EventFrameSequence
from models.network import ConvSpec, FlattenSpec, IFSpec, NetworkConfig, retina_tiny
from services.learning import (centroid_error, centroid_errors, error_summary, loss_box, loss_conf, loss_syn,
                               spike, surrogate_grad, total_loss)
from services.learning.trainer import (TRAIN_LOG_HEADER, LossRecord, Trainer, evaluate, save_checkpoint,
                                       split_dataset, train, write_training_log)
from services.readout import apply_filter, build_filter, decode_grid, identity_filter
from services.snn import build_network, if_step, load_network, load_weights

def readout_config() -> NetworkConfig:
    """Сеть без BN: conv 2->4 (шаг 4) -> IF -> flatten -> conv 1024->160 -> IF."""
    return NetworkConfig(
        layers=[
            ConvSpec(c_in=2, c_out=4, k_x=5, k_y=5, s_x=4, s_y=4, p_x=2, p_y=2, bias=True),
            IFSpec(),
            FlattenSpec(),
            ConvSpec(c_in=4 * 16 * 16, c_out=160, k_x=1, k_y=1, bias=True),
            IFSpec(),
        ],
        name="readout",
    )

def make_sequence(rng, num_bins=8, label=(32.0, 32.0), density=0.05) -> EventFrameSequence:
    frames = (rng.random((num_bins, 2, 64, 64)) < density).astype(np.uint8)
    return EventFrameSequence(frames, np.arange(1, num_bins + 1) * 1000, np.tile(label, (num_bins, 1)))

def quick_config(**kwargs) -> TrainConfig:
    values = dict(iterations=3, batch_size=2, sequence_length=8, lr=1e-3, validation_fraction=0.0, log_every=0)
    values.update(kwargs)
    return TrainConfig(**values)

# === Суррогатный градиент ===

def test_surrogate_peak_and_tail():
    assert surrogate_grad(1.0) == 1.0
    assert surrogate_grad(1.0, alpha=0.5) == 0.5
    assert surrogate_grad(1.0 + 10 / 10) == pytest.approx(math.exp(-10))
    assert surrogate_grad(1.0 - 10 / 10) == pytest.approx(math.exp(-10))

def test_surrogate_is_even_and_positive():
    d = torch.linspace(0, 3, 50, dtype=torch.float64)
    above = surrogate_grad(1.0 + d, alpha=2.0, beta=3.0)
    below = surrogate_grad(1.0 - d, alpha=2.0, beta=3.0)
    assert torch.allclose(above, below)
    assert torch.all(above > 0)

def test_spike_backward_uses_surrogate():
    v = torch.tensor([0.5, 1.0, 1.3], dtype=torch.float64, requires_grad=True)
    out = spike(v)
    assert out.tolist() == [0.0, 1.0, 1.0]
    out.sum().backward()
    assert torch.allclose(v.grad, surrogate_grad(v.detach()))

@pytest.mark.parametrize("reset_grad, expected", [("stop", 0.0), ("pass", -1.2 * math.exp(-2))])
def test_reset_gradient_modes(reset_grad, expected):
    current = torch.tensor([1.2], dtype=torch.float64, requires_grad=True)
    _, v = if_step(torch.zeros(1, dtype=torch.float64), current, reset_grad=reset_grad)
    v.sum().backward()
    assert current.grad.item() == pytest.approx(expected)

def test_unknown_reset_mode():
    with pytest.raises(DataError):
        if_step(torch.zeros(1), torch.zeros(1), reset_grad="soft")

# === Функции потерь ===

def test_loss_box_examples():
    target = torch.tensor([[0.1, 0.2, 0.3, 0.4]])
    assert loss_box(target, target) == 0
    assert loss_box(target + 1, target).item() == pytest.approx(4)

def test_loss_box_matches_direct_sum():
    rng = np.random.default_rng(0)
    pred, target = rng.random((7, 4)), rng.random((7, 4))
    expected = sum((p - t) ** 2 for row_p, row_t in zip(pred, target) for p, t in zip(row_p, row_t))
    assert loss_box(torch.from_numpy(pred), torch.from_numpy(target)).item() == pytest.approx(expected)

def test_loss_box_count_mismatch():
    with pytest.raises(DataError):
        loss_box(torch.zeros(2, 4), torch.zeros(3, 4))

def test_loss_conf_examples():
    conf = torch.zeros(4, 4, 2)
    assert loss_conf(conf, conf) == 0
    target = conf.clone()
    target[1, 2, 0] = 1
    assert loss_conf(conf, target) == 1
    rng = np.random.default_rng(1)
    a, b = rng.random((3, 4, 4, 2)), rng.random((3, 4, 4, 2))
    assert loss_conf(torch.from_numpy(a), torch.from_numpy(b)).item() == pytest.approx(float(((a - b) ** 2).sum()))
    with pytest.raises(DataError):
        loss_conf(torch.zeros(4, 4, 2), torch.zeros(4, 4, 1))

@pytest.mark.parametrize("ops, expected", [([1e6, 1e6, 1e6], 0.0), ([2e6], 1.0), ([0.0], 1.0), ([0.0, 3e6], 5.0)])
def test_loss_syn_examples(ops, expected):
    assert loss_syn(ops) == pytest.approx(expected)

def test_loss_syn_rejects_bad_target():
    with pytest.raises(DataError):
        loss_syn([1.0], target=0)

def test_total_loss_weights():
    assert total_loss(0, 0, 0) == 0
    assert total_loss(1, 1, 1) == pytest.approx(9.0000001)
    weights = LossWeights(lambda_box=2.0, lambda_conf=3.0, lambda_syn=0.5)
    assert total_loss(0.25, 2.0, 4.0, weights) == pytest.approx(0.5 + 6.0 + 2.0)

def test_readout_path_gradient_matches_central_differences():
    """conv + BN + фильтр + функции потерь без спайков: градиент против конечных разностей."""
    rng = np.random.default_rng(2)
    x = torch.from_numpy(rng.random((6, 2, 4, 4)))
    bn = nn.BatchNorm2d(10).double()
    with torch.no_grad():
        bn.weight.copy_(torch.from_numpy(rng.uniform(0.5, 2.0, 10)))
        bn.bias.copy_(torch.from_numpy(rng.normal(size=10)))
        bn.running_mean.copy_(torch.from_numpy(rng.normal(size=10)))
        bn.running_var.copy_(torch.from_numpy(rng.uniform(0.5, 2.0, 10)))
    bn.eval()
    filt = build_filter(5, 5, 4)
    target_conf = torch.from_numpy(rng.random((6, 4, 4, 2)))
    target_box = torch.from_numpy(rng.random((6, 2, 4)))

    def objective(weight):
        features = bn(F.conv2d(x, weight, padding=1)).reshape(6, 160)
        grid = decode_grid(apply_filter(filt, features))
        return loss_conf(grid.confidence, target_conf) + loss_box(grid.coords[:, 1, 2], target_box)

    weight = torch.from_numpy(rng.normal(scale=0.3, size=(10, 2, 3, 3))).requires_grad_(True)
    objective(weight).backward()
    analytic = weight.grad.clone()

    h = 1e-6
    numeric = torch.zeros_like(analytic)
    with torch.no_grad():
        flat = weight.view(-1)
        for i in range(flat.numel()):
            original = flat[i].item()
            flat[i] = original + h
            plus = objective(weight).item()
            flat[i] = original - h
            minus = objective(weight).item()
            flat[i] = original
            numeric.view(-1)[i] = (plus - minus) / (2 * h)

    relative = (analytic - numeric).abs().max() / numeric.abs().max()
    assert relative < 1e-5

# === Метрики ===

def test_centroid_error_examples():
    assert centroid_error((1.5, 2.5), (1.5, 2.5)) == 0
    assert centroid_error((0, 0), (3, 4)) == 5

def test_error_summary_matches_oracle():
    rng = np.random.default_rng(3)
    pred, labels = rng.uniform(0, 64, (50, 2)), rng.uniform(0, 64, (50, 2))
    errors = centroid_errors(pred, labels)
    expected = [math.dist(p, l) for p, l in zip(pred, labels)]
    np.testing.assert_allclose(errors, expected)
    mean, std = error_summary(errors)
    assert mean == pytest.approx(sum(expected) / 50)
    assert std == pytest.approx(math.sqrt(sum((e - mean) ** 2 for e in expected) / 50))

def test_error_summary_empty():
    mean, std = error_summary(np.zeros(0))
    assert math.isnan(mean) and math.isnan(std)

# === Разбиение набора ===

def test_split_takes_tail_for_validation():
    rng = np.random.default_rng(4)
    dataset = [make_sequence(rng, num_bins=2) for _ in range(10)]
    train_set, val_set = split_dataset(dataset, 0.2)
    assert train_set == dataset[:8] and val_set == dataset[8:]

@pytest.mark.parametrize("size, fraction, sizes", [(5, 0.0, (5, 0)), (1, 0.5, (1, 0)), (2, 0.9, (1, 1)), (7, 0.3, (5, 2))])
def test_split_sizes(size, fraction, sizes):
    rng = np.random.default_rng(5)
    train_set, val_set = split_dataset([make_sequence(rng, num_bins=2) for _ in range(size)], fraction)
    assert (len(train_set), len(val_set)) == sizes

# === Цикл обучения ===

def test_zero_learning_rate_keeps_parameters():
    rng = np.random.default_rng(6)
    net = build_network(retina_tiny(), seed=0)
    before = [p.detach().clone() for p in net.parameters()]
    dataset = [make_sequence(rng) for _ in range(3)]
    history = Trainer(net, quick_config(lr=0.0)).train(dataset, progress=False)
    assert len(history) == 3
    for old, new in zip(before, net.parameters()):
        assert torch.equal(old, new)

def test_overfits_single_sequence():
    rng = np.random.default_rng(7)
    net = build_network(readout_config(), seed=1)
    trainer = Trainer(net, quick_config(iterations=60, lr=0.05), temporal_filter=identity_filter(), seed=0)
    history = trainer.train([make_sequence(rng, label=(20.0, 40.0))], progress=False)
    losses = [record.total for record in history]
    assert min(losses[-10:]) < losses[0]

def test_learning_rate_schedule():
    rng = np.random.default_rng(8)
    net = build_network(readout_config(), seed=2)
    config = quick_config(iterations=5, lr=0.1, lr_step=2, lr_gamma=0.8)
    history = Trainer(net, config, temporal_filter=identity_filter()).train([make_sequence(rng)], progress=False)
    assert [record.lr for record in history] == pytest.approx([0.1, 0.1, 0.08, 0.08, 0.064])

def test_diverged_loss_aborts():
    rng = np.random.default_rng(9)
    net = build_network(readout_config(), seed=3)
    trainer = Trainer(net, quick_config(), LossWeights(lambda_box=float("nan")))
    with pytest.raises(TrainingDivergedError) as exc:
        trainer.train([make_sequence(rng)], progress=False)
    assert exc.value.iteration == 0

def test_empty_dataset_rejected():
    with pytest.raises(DataError):
        Trainer(build_network(readout_config())).train([], progress=False)

def test_loss_skips_filter_warmup_bins():
    rng = np.random.default_rng(13)
    net = build_network(readout_config(), seed=9, dtype=torch.float64)
    frames = (rng.random((1, 6, 2, 64, 64)) < 0.05).astype(np.float64)
    labels = np.tile([30.0, 30.0], (1, 6, 1))
    moved = labels.copy()
    moved[:, :3] = [5.0, 50.0]
    filt = build_filter(5.0, 5.0, 4)

    trainer = Trainer(net, quick_config(), temporal_filter=filt)
    assert trainer.first_loss_bin(6) == 3
    assert Trainer(net, quick_config()).first_loss_bin(8) == 7
    with torch.no_grad():
        assert float(trainer.compute_loss(frames, labels)[0]) == float(trainer.compute_loss(frames, moved)[0])

    full = Trainer(net, quick_config(skip_filter_warmup=False), temporal_filter=filt)
    assert full.first_loss_bin(6) == 0
    with torch.no_grad():
        assert float(full.compute_loss(frames, labels)[0]) != float(full.compute_loss(frames, moved)[0])

def test_training_without_state_reset():
    rng = np.random.default_rng(10)
    net = build_network(readout_config(), seed=4)
    history = Trainer(net, quick_config(reset_states=False)).train([make_sequence(rng)], progress=False)
    assert all(math.isfinite(record.total) for record in history)

def test_train_validates_on_tail(tmp_path):
    rng = np.random.default_rng(11)
    dataset = [make_sequence(rng, label=(10.0 + i, 30.0)) for i in range(4)]
    result = train(build_network(readout_config(), seed=5), dataset, quick_config(validation_fraction=0.5),
                   log_path=tmp_path / "train_log.csv", progress=False)
    assert len(result.losses) == 3
    assert result.validation.count == 2
    assert 0 <= result.validation.mean_error <= 64 * math.sqrt(2)

    with open(tmp_path / "train_log.csv", newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert rows[0] == TRAIN_LOG_HEADER
    assert [float(row[1]) for row in rows[1:]] == result.losses

# === Оценка и чекпоинт ===

def test_evaluate_counts_and_bounds():
    rng = np.random.default_rng(12)
    net = build_network(retina_tiny(), seed=6)
    dataset = [make_sequence(rng, num_bins=5) for _ in range(3)]
    last_only = evaluate(net, dataset)
    all_bins = evaluate(net, dataset, last_bin_only=False)
    assert last_only.count == 3 and all_bins.count == 15
    assert np.all(all_bins.errors <= 64 * math.sqrt(2))
    assert net.training
    assert evaluate(net, dataset).mean_error == last_only.mean_error

def test_write_training_log_round_trip(tmp_path):
    history = [LossRecord(0, 1.25, 0.1, 0.2, 0.3, 1e-3), LossRecord(1, 0.75, 0.05, 0.1, 0.2, 1e-3)]
    path = write_training_log(history, tmp_path / "logs" / "train_log.csv")
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert [float(row["loss_total"]) for row in rows] == [1.25, 0.75]
    assert rows[1]["iter"] == "1"

def test_checkpoint_restores_network(tmp_path):
    net = build_network(retina_tiny(), seed=7)
    network_path, weights_path = save_checkpoint(net, tmp_path)
    restored = load_weights(build_network(load_network(network_path), seed=8), weights_path)
    for key, tensor in net.state_dict().items():
        if tensor.is_floating_point():
            assert torch.equal(tensor, restored.state_dict()[key])

if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
