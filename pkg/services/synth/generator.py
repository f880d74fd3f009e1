"""Детерминированный генератор синтетических записей движущегося зрачка.

Контур зрачка (кольцо) на кромке, идущей вперёд по движению, даёт ON-события,
на задней кромке OFF; интенсивность пропорциональна |cos| угла между
нормалью кольца и направлением движения. Неподвижный зрачок событий не даёт.
"""

import logging
import math
from typing import Tuple

import numpy as np

from models.events import EventStream, PupilLabel, Recording
from models.synthetic import CIRCULAR, RANDOM_WALK, SynthConfig

logger = logging.getLogger(__name__)

US_PER_S = 1_000_000
US_PER_MS = 1_000

class Trajectory:
    """Аналитическая траектория центра зрачка, время в микросекундах."""

    def __init__(self, cfg: SynthConfig, rng: np.random.Generator):
        self.cfg = cfg
        self._waypoint_t = None
        self._waypoints = None
        if cfg.trajectory == RANDOM_WALK and cfg.speed > 0 and cfg.orbit_radius > 0:
            self._build_waypoints(rng)

    def _build_waypoints(self, rng: np.random.Generator) -> None:
        cfg = self.cfg
        segment_us = cfg.orbit_radius / cfg.speed * US_PER_S
        count = int(math.ceil(cfg.duration_us / segment_us)) + 2
        margin = cfg.pupil_radius + cfg.edge_width
        low = np.array([margin, margin])
        high = np.array([cfg.width - 1 - margin, cfg.height - 1 - margin])
        start = np.array([cfg.center_x, cfg.center_y])

        points = [start]
        for _ in range(count - 1):
            angle = rng.uniform(0.0, 2 * math.pi)
            step = cfg.orbit_radius * np.array([math.cos(angle), math.sin(angle)])
            nxt = points[-1] + step
            if np.all(low <= high):
                nxt = np.clip(nxt, low, high)
            points.append(nxt)

        self._waypoint_t = np.arange(count, dtype=np.float64) * segment_us
        self._waypoints = np.array(points)

    @property
    def omega(self) -> float:
        """Угловая скорость круговой траектории, рад/с."""
        if self.cfg.orbit_radius <= 0:
            return 0.0
        return self.cfg.speed / self.cfg.orbit_radius

    def position(self, t_us) -> Tuple[np.ndarray, np.ndarray]:
        cfg = self.cfg
        t_us = np.asarray(t_us, dtype=np.float64)
        if cfg.trajectory == CIRCULAR:
            phase = self.omega * t_us / US_PER_S
            return (cfg.center_x + cfg.orbit_radius * np.cos(phase),
                    cfg.center_y + cfg.orbit_radius * np.sin(phase))
        if self._waypoints is None:
            return np.full_like(t_us, cfg.center_x), np.full_like(t_us, cfg.center_y)
        return (np.interp(t_us, self._waypoint_t, self._waypoints[:, 0]),
                np.interp(t_us, self._waypoint_t, self._waypoints[:, 1]))

    def velocity(self, t_us: float) -> np.ndarray:
        """Скорость в пикселях в секунду."""
        cfg = self.cfg
        if cfg.trajectory == CIRCULAR:
            phase = self.omega * t_us / US_PER_S
            radius_omega = cfg.orbit_radius * self.omega
            return np.array([-radius_omega * math.sin(phase), radius_omega * math.cos(phase)])
        if self._waypoints is None:
            return np.zeros(2)
        k = min(int(np.searchsorted(self._waypoint_t, t_us, side="right")) - 1, len(self._waypoint_t) - 2)
        dt_s = (self._waypoint_t[k + 1] - self._waypoint_t[k]) / US_PER_S
        return (self._waypoints[k + 1] - self._waypoints[k]) / dt_s

def _ring_offsets(cfg: SynthConfig) -> Tuple[np.ndarray, np.ndarray]:
    reach = int(math.ceil(cfg.pupil_radius + cfg.edge_width)) + 1
    grid = np.arange(-reach, reach + 1)
    dx, dy = np.meshgrid(grid, grid)
    return dx.ravel(), dy.ravel()

def _edge_events(cfg: SynthConfig, trajectory: Trajectory, rng: np.random.Generator,
                 t0: int, dt_ms: float, offsets: Tuple[np.ndarray, np.ndarray]):
    mid = t0 + cfg.step_us / 2
    velocity = trajectory.velocity(mid)
    speed = float(np.hypot(*velocity))
    if speed == 0 or cfg.event_rate_on_ring == 0:
        return None

    cx, cy = (float(v) for v in trajectory.position(mid))
    px = np.round(cx).astype(np.int64) + offsets[0]
    py = np.round(cy).astype(np.int64) + offsets[1]
    inside = (px >= 0) & (px < cfg.width) & (py >= 0) & (py < cfg.height)
    px, py = px[inside], py[inside]

    rx, ry = px - cx, py - cy
    r = np.hypot(rx, ry)
    ring = (np.abs(r - cfg.pupil_radius) <= cfg.edge_width) & (r > 0)
    px, py, rx, ry, r = px[ring], py[ring], rx[ring], ry[ring], r[ring]

    cos_theta = (rx * velocity[0] + ry * velocity[1]) / (r * speed)
    counts = rng.poisson(cfg.event_rate_on_ring * dt_ms * np.abs(cos_theta))
    polarity = (cos_theta > 0).astype(np.uint8)
    return np.repeat(px, counts), np.repeat(py, counts), np.repeat(polarity, counts)

def _noise_events(cfg: SynthConfig, rng: np.random.Generator, dt_ms: float):
    n = rng.poisson(cfg.noise_rate * dt_ms)
    return (rng.integers(0, cfg.width, n), rng.integers(0, cfg.height, n),
            rng.integers(0, 2, n).astype(np.uint8))

def _label_times(cfg: SynthConfig) -> np.ndarray:
    times = np.arange(0, cfg.duration_us, cfg.label_period_us, dtype=np.int64)
    if len(times) < 2:
        times = np.append(times, cfg.duration_us)
    return times

def generate(cfg: SynthConfig) -> Recording:
    """Запись полностью определяется cfg (включая rng_seed)."""
    rng = np.random.default_rng(cfg.rng_seed)
    trajectory = Trajectory(cfg, rng)
    offsets = _ring_offsets(cfg)

    ts, xs, ys, ps = [], [], [], []
    for t0 in range(0, cfg.duration_us, cfg.step_us):
        step = min(cfg.step_us, cfg.duration_us - t0)
        dt_ms = step / US_PER_MS
        chunks = [_noise_events(cfg, rng, dt_ms)]
        edges = _edge_events(cfg, trajectory, rng, t0, dt_ms, offsets)
        if edges is not None:
            chunks.append(edges)

        x = np.concatenate([c[0] for c in chunks])
        y = np.concatenate([c[1] for c in chunks])
        p = np.concatenate([c[2] for c in chunks])
        t = rng.integers(t0, t0 + step, len(x))
        order = np.argsort(t, kind="stable")
        ts.append(t[order])
        xs.append(x[order])
        ys.append(y[order])
        ps.append(p[order])

    stream = EventStream(
        cfg.width,
        cfg.height,
        np.concatenate(ts).astype(np.int64),
        np.concatenate(xs),
        np.concatenate(ys),
        np.concatenate(ps),
    )

    label_t = _label_times(cfg)
    lx, ly = trajectory.position(label_t)
    labels = [PupilLabel(int(t), float(x), float(y)) for t, x, y in zip(label_t, lx, ly)]

    logger.info(f"🎲 Синтетическая запись: {len(stream)} событий, {len(labels)} меток "
                f"({cfg.trajectory}, seed={cfg.rng_seed})")
    return Recording(stream, labels)
