"""Сверка рассчитанных требований с напечатанной таблицей архитектуры."""

import logging
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence

from models.hardware import (SPECK_CORES, CoreSpec, LayerFootprint, PrintedLayerRow,
                             PRINTED_LAYER_TABLE, Verdict)
from services.hardware.mapper import compatible_cores

logger = logging.getLogger(__name__)

AS_PRINTED = "as-printed"
SWAPPED = "swapped"

@dataclass(frozen=True)
class LayerVerdict:
    """Вердикт по слою и совпадения отдельных значений."""
    layer_id: int
    verdict: Verdict
    kernel_ki: float
    kernel_pow2_ki: Optional[float]
    neuron_ki: float
    kernel_match: Optional[str]
    neuron_match: Optional[str]
    cores: FrozenSet[int]
    printed: PrintedLayerRow
    cores_match: bool

def _close(a: Optional[float], b: float, tol: float) -> bool:
    return a is not None and abs(a - b) <= tol

def _match(values: Sequence[Optional[float]], as_printed: float, swapped: float, tol: float) -> Optional[str]:
    if any(_close(v, as_printed, tol) for v in values):
        return AS_PRINTED
    if any(_close(v, swapped, tol) for v in values):
        return SWAPPED
    return None

def validate_against_table(footprints: Sequence[LayerFootprint],
                           table: Sequence[PrintedLayerRow] = PRINTED_LAYER_TABLE,
                           cores: Sequence[CoreSpec] = SPECK_CORES, tol: float = 0.01) -> List[LayerVerdict]:
    """Трёхзначный вердикт для каждой строки таблицы, у которой есть рассчитанный слой.

    Ядро сравнивается и в точной форме, и в форме со степенями двойки.
    """
    by_id = {fp.layer_id: fp for fp in footprints}
    all_cores = frozenset(core.id for core in cores)
    verdicts = []

    for row in table:
        fp = by_id.get(row.layer_id)
        if fp is None:
            continue
        pow2_ki = fp.kernel_entries_pow2 / 1024 if fp.kernel_entries_pow2 is not None else None

        kernel_match = _match([fp.kernel_ki, pow2_ki], row.k_mt_ki, row.n_m_ki, tol)
        neuron_match = _match([fp.neuron_ki], row.n_m_ki, row.k_mt_ki, tol)
        if kernel_match == neuron_match == AS_PRINTED:
            verdict = Verdict.AS_PRINTED
        elif kernel_match == neuron_match == SWAPPED:
            verdict = Verdict.SWAPPED
        else:
            verdict = Verdict.MISMATCH

        compatible = compatible_cores(fp, cores)
        printed_cores = row.cores if row.cores is not None else all_cores
        verdicts.append(LayerVerdict(
            layer_id=row.layer_id,
            verdict=verdict,
            kernel_ki=fp.kernel_ki,
            kernel_pow2_ki=pow2_ki,
            neuron_ki=fp.neuron_ki,
            kernel_match=kernel_match,
            neuron_match=neuron_match,
            cores=compatible,
            printed=row,
            cores_match=compatible == printed_cores,
        ))

    mismatches = sum(v.verdict is Verdict.MISMATCH for v in verdicts)
    if mismatches:
        logger.warning(f"⚠️ Расхождения с таблицей: {mismatches} из {len(verdicts)} слоёв")
    return verdicts
