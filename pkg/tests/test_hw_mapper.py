"""Тесты размещения слоёв: память ядер и нейронов, совместимость, поиск, сверка с таблицей."""

import os
import sys

import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.hardware import KI, SPECK_CORES, LayerFootprint, Verdict
from models.network import ConvSpec, retina_core_layout, retina_default
from services.snn import count_macs, count_params
from services.hardware import (assign_layers, compatible_cores, kernel_memory, layer_footprints, neuron_memory,
                               printed_footprints, validate_against_table)

ALL_CORES = frozenset(range(9))

def footprint(kernel_ki: float, neuron_ki: float, layer_id: int = 1) -> LayerFootprint:
    return LayerFootprint(layer_id, round(kernel_ki * KI), round(neuron_ki * KI))

# === Память ===

@pytest.mark.parametrize("c_in, c_out, k, exact, pow2", [
    (2, 16, 5, 800, 1024),
    (16, 64, 3, 9216, 16384),
    (1, 1, 1, 1, 1),
])
def test_kernel_memory(c_in, c_out, k, exact, pow2):
    conv = ConvSpec(c_in=c_in, c_out=c_out, k_x=k, k_y=k)
    assert kernel_memory(conv) == exact
    assert kernel_memory(conv, pow2=True) == pow2

def test_kernel_memory_matches_printed_values():
    assert kernel_memory(ConvSpec(c_in=2, c_out=16, k_x=5, k_y=5)) / KI == pytest.approx(0.78, abs=0.01)
    assert kernel_memory(ConvSpec(c_in=16, c_out=64, k_x=3, k_y=3)) / KI == 9.0

def test_neuron_memory():
    assert neuron_memory(64, 32, 32) == 64 * KI
    assert neuron_memory(1, 1, 1) == 1
    with pytest.raises(ValueError):
        neuron_memory(0, 3, 3)

def test_default_footprints():
    footprints = {fp.layer_id: fp for fp in layer_footprints(retina_default())}
    assert sorted(footprints) == list(range(1, 9))
    assert footprints[1].kernel_ki == 0.78125
    assert footprints[1].neuron_entries == 16 * 31 * 31
    assert footprints[2].kernel_ki == 9.0
    assert footprints[2].neuron_ki == pytest.approx(14.0625)
    assert footprints[7].kernel_entries == 144 * 128
    assert footprints[8].neuron_entries == 160
    assert footprints[2].kernel_bytes == 9216 and footprints[2].neuron_bytes == 2 * 14400

# === Совместимость ===

def test_compatible_cores_examples():
    assert compatible_cores(footprint(9, 64)) == {0, 1, 2}
    assert compatible_cores(footprint(1, 1)) == ALL_CORES
    assert compatible_cores(footprint(65, 1)) == frozenset()

def test_printed_footprints_reproduce_core_column():
    by_id = {fp.layer_id: compatible_cores(fp) for fp in printed_footprints()}
    assert by_id[2] == {0, 1, 2}
    assert by_id[7] == {3, 4, 5, 6}
    assert by_id[8] == {5, 6}
    assert by_id[1] == ALL_CORES

# === Поиск размещения ===

def assert_valid(result, footprints):
    assert result.feasible
    assert len(set(result.assignment.values())) == len(result.assignment) == len(footprints)
    for layer, core in result.assignment.items():
        assert core in result.domains[layer]

def test_default_network_is_placeable():
    footprints = layer_footprints(retina_default())
    assert_valid(assign_layers(footprints), footprints)

def test_printed_table_is_placeable_deterministically():
    footprints = printed_footprints()
    result = assign_layers(footprints)
    assert_valid(result, footprints)
    assert result.assignment == {1: 1, 2: 0, 3: 2, 4: 4, 5: 6, 6: 7, 7: 3, 8: 5}
    assert assign_layers(footprints).assignment == result.assignment

def test_pigeonhole_conflict():
    footprints = [footprint(40, 1, layer_id=1), footprint(40, 1, layer_id=2)]
    cores = [core for core in SPECK_CORES if core.id != 6]
    result = assign_layers(footprints, cores)
    assert not result.feasible
    assert result.conflict == [1, 2]

def test_hall_violation_is_minimal():
    domains = {1: frozenset({0, 1}), 2: frozenset({5}), 3: frozenset({5}), 4: frozenset({0, 1, 2})}
    result = assign_layers([], domains=domains)
    assert result.conflict == [2, 3]
    assert result.assignment == {}

def test_empty_layer_list():
    result = assign_layers([])
    assert result.feasible and result.assignment == {}

# === Сверка с таблицей ===

def test_core_layout_reproduces_layers_one_and_two():
    verdicts = {v.layer_id: v for v in validate_against_table(layer_footprints(retina_core_layout()))}
    assert verdicts[1].kernel_ki == pytest.approx(0.78, abs=0.01)
    assert verdicts[1].kernel_match == "swapped"
    assert verdicts[1].cores_match
    assert verdicts[2].verdict is Verdict.SWAPPED
    assert (verdicts[2].kernel_ki, verdicts[2].neuron_ki) == (9.0, 64.0)
    assert verdicts[2].cores == {0, 1, 2}
    assert verdicts[2].cores_match

def test_core_layout_layers_printed_all_fit_every_core():
    verdicts = validate_against_table(layer_footprints(retina_core_layout()))
    for v in verdicts:
        if v.printed.cores is None:
            assert v.cores == ALL_CORES, v.layer_id
    assert {v.layer_id: v.cores for v in verdicts}[7] == {3, 4, 5, 6}

def test_core_layout_is_placeable():
    footprints = layer_footprints(retina_core_layout())
    result = assign_layers(footprints)
    assert_valid(result, footprints)
    assert result.assignment[2] in {0, 1, 2}

def test_compact_trace_keeps_mac_budget_but_not_layer_two_memory():
    compact = retina_default()
    layout = retina_core_layout()
    assert count_params(compact) == count_params(layout) == 63176
    assert abs(count_macs(compact) - 3.03e6) / 3.03e6 <= 0.25
    assert count_macs(layout) == 12_253_696
    verdicts = {v.layer_id: v for v in validate_against_table(layer_footprints(compact))}
    assert verdicts[1].verdict is Verdict.SWAPPED
    assert verdicts[2].kernel_match == "swapped"
    assert verdicts[2].neuron_ki == pytest.approx(14.0625)

def test_printed_table_agrees_with_itself_when_swapped():
    verdicts = validate_against_table(printed_footprints())
    assert len(verdicts) == 8
    assert all(v.verdict is Verdict.SWAPPED for v in verdicts)
    assert all(v.cores_match for v in verdicts)

if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
