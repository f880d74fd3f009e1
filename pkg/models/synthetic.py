"""Конфигурация синтетического генератора записей."""

from dataclasses import dataclass

from core.exceptions import DataError

CIRCULAR = "circular"
RANDOM_WALK = "random-walk"

@dataclass(frozen=True)
class SynthConfig:
    """Параметры синтетической записи движущегося зрачка."""
    width: int = 640
    height: int = 480
    duration_us: int = 2_000_000
    trajectory: str = CIRCULAR
    speed: float = 400.0  # пикселей в секунду
    orbit_radius: float = 60.0  # радиус круговой траектории / шаг блуждания
    center_x: float = 352.0
    center_y: float = 240.0
    pupil_radius: float = 48.0
    edge_width: float = 1.5  # полуширина кольца кромки, пиксели
    event_rate_on_ring: float = 0.1  # событий на пиксель кромки в мс
    noise_rate: float = 5.0  # фоновых событий в мс на весь кадр
    label_period_us: int = 30_000
    step_us: int = 1_000
    rng_seed: int = 0

    def __post_init__(self):
        if self.duration_us <= 0:
            raise DataError(f"duration должен быть > 0: {self.duration_us}")
        if self.label_period_us <= 0 or self.step_us <= 0:
            raise DataError("label_period и step должны быть > 0")
        for name in ("speed", "event_rate_on_ring", "noise_rate", "pupil_radius", "orbit_radius", "edge_width"):
            if getattr(self, name) < 0:
                raise DataError(f"{name} не может быть отрицательным")
        if self.trajectory not in (CIRCULAR, RANDOM_WALK):
            raise DataError(f"Неизвестная траектория: {self.trajectory}")
        if self.width <= 0 or self.height <= 0:
            raise DataError(f"Некорректное разрешение {self.width}x{self.height}")

# Фиксированная конфигурация для регрессионных тестов и обучения на столе
GOLDEN_SYNTH_CONFIG = SynthConfig(
    duration_us=3_000_000,
    trajectory=CIRCULAR,
    speed=300.0,
    orbit_radius=100.0,
    pupil_radius=64.0,
    event_rate_on_ring=0.05,
    noise_rate=4.0,
    rng_seed=2024,
)
