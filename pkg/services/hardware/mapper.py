"""Совместимость слоёв с ядрами и поиск инъективного размещения."""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence

from models.hardware import SPECK_CORES, CoreSpec, LayerFootprint

logger = logging.getLogger(__name__)

def compatible_cores(footprint: LayerFootprint, cores: Sequence[CoreSpec] = SPECK_CORES) -> FrozenSet[int]:
    """Ядра, лимиты которых (в Ki записей) покрывают точные требования слоя."""
    return frozenset(
        core.id for core in cores
        if core.kernel_limit >= footprint.kernel_ki and core.neuron_limit >= footprint.neuron_ki
    )

@dataclass
class AssignmentResult:
    """Размещение слой -> ядро либо минимальное неразмещаемое подмножество слоёв."""
    assignment: Dict[int, int] = field(default_factory=dict)
    conflict: List[int] = field(default_factory=list)
    domains: Dict[int, FrozenSet[int]] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return not self.conflict

def _backtrack(order: List[int], domains: Dict[int, FrozenSet[int]],
               assignment: Dict[int, int], used: set) -> bool:
    if len(assignment) == len(order):
        return True
    layer = order[len(assignment)]
    for core in sorted(domains[layer]):
        if core in used:
            continue
        assignment[layer] = core
        used.add(core)
        if _backtrack(order, domains, assignment, used):
            return True
        del assignment[layer]
        used.discard(core)
    return False

def _hall_violation(domains: Dict[int, FrozenSet[int]]) -> List[int]:
    """Наименьшее подмножество слоёв, которому доступно меньше ядер, чем слоёв в нём."""
    layers = sorted(domains)
    for size in range(1, len(layers) + 1):
        for subset in combinations(layers, size):
            available = frozenset().union(*(domains[layer] for layer in subset))
            if len(available) < size:
                return list(subset)
    return layers

def assign_layers(footprints: Sequence[LayerFootprint], cores: Sequence[CoreSpec] = SPECK_CORES,
                  domains: Optional[Dict[int, FrozenSet[int]]] = None) -> AssignmentResult:
    """Поиск с возвратом: сначала слой с наименьшим числом ядер, ядра по возрастанию id.

    domains позволяет задать совместимость вручную вместо расчёта по лимитам.
    """
    if domains is None:
        domains = {fp.layer_id: compatible_cores(fp, cores) for fp in footprints}
    order = sorted(domains, key=lambda layer: (len(domains[layer]), layer))

    assignment: Dict[int, int] = {}
    if _backtrack(order, domains, assignment, set()):
        logger.info(f"✅ Найдено размещение {len(assignment)} слоёв")
        return AssignmentResult(assignment=dict(sorted(assignment.items())), domains=dict(domains))

    conflict = _hall_violation(domains)
    logger.warning(f"⚠️ Размещение невозможно, конфликтующие слои: {conflict}")
    return AssignmentResult(conflict=conflict, domains=dict(domains))
