"""
Labelled synthetic scenes: a small moving object plus uniform background
activity.

Both the object ("signal") and the background ("noise") emit homogeneous
Poisson processes.  Signal events land uniformly within ``cluster_radius``
(Chebyshev) of the object centre at their timestamp and are labelled REAL;
noise events land uniformly over the whole sensor and are labelled NOISE.

Randomness comes from ``numpy.random.default_rng(seed)`` (PCG64).  The draw
order is fixed: signal arrivals, signal offsets, noise arrivals, noise pixels,
noise polarities.  Cross-implementation fixtures should pin recorded streams,
not RNG equivalence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .events import Event, Label, LabeledEvent, Polarity, SensorGeometry


@dataclass(frozen=True)
class Pendulum:
    """Bob on a rigid arm swinging about a pivot above ``center``.

    ``center`` is the bob's lowest point (x, y) in pixels, ``amplitude`` the
    horizontal half-swing in pixels, ``period_us`` one full oscillation.  The
    arm is twice the amplitude long, so the swing spans +-30 degrees.
    """

    center: tuple[float, float]
    amplitude: float
    period_us: float

    def _angle(self, t):
        theta_max = math.asin(0.5)
        w = 2 * np.pi / self.period_us
        return theta_max * np.sin(w * t), theta_max * w * np.cos(w * t)

    def position(self, t):
        arm = 2.0 * self.amplitude
        th, _ = self._angle(np.asarray(t, dtype=np.float64))
        return self.center[0] + arm * np.sin(th), self.center[1] - arm * (1 - np.cos(th))

    def velocity(self, t):
        arm = 2.0 * self.amplitude
        th, dth = self._angle(np.asarray(t, dtype=np.float64))
        return arm * np.cos(th) * dth, -arm * np.sin(th) * dth

    def bounds(self, duration_us: float):
        arm = 2.0 * self.amplitude
        cx, cy = self.center
        return cx - self.amplitude, cx + self.amplitude, cy - arm * (1 - math.cos(math.asin(0.5))), cy


@dataclass(frozen=True)
class Linear:
    """Constant-velocity motion; ``velocity`` in pixels per second."""

    start: tuple[float, float]
    velocity: tuple[float, float]

    def position(self, t):
        t = np.asarray(t, dtype=np.float64) * 1e-6
        return self.start[0] + self.velocity[0] * t, self.start[1] + self.velocity[1] * t

    def velocity_at(self, t):
        t = np.asarray(t, dtype=np.float64)
        return np.full_like(t, self.velocity[0]), np.full_like(t, self.velocity[1])

    def bounds(self, duration_us: float):
        x1, y1 = self.position(duration_us)
        x0, y0 = self.start
        return min(x0, x1), max(x0, x1), min(y0, y1), max(y0, y1)


Trajectory = Union[Pendulum, Linear]


def _velocity(traj: Trajectory, t):
    if isinstance(traj, Linear):
        return traj.velocity_at(t)
    return traj.velocity(t)


@dataclass(frozen=True)
class SceneConfig:
    geom: SensorGeometry
    duration_us: int
    signal_rate: float  # events/s from the object
    noise_rate: float  # events/s over the whole array
    trajectory: Trajectory
    cluster_radius: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.duration_us < 0:
            raise ValueError("duration must be >= 0")
        if self.signal_rate < 0 or self.noise_rate < 0:
            raise ValueError("rates must be >= 0")
        if self.cluster_radius < 0:
            raise ValueError("cluster_radius must be >= 0")
        x0, x1, y0, y1 = self.trajectory.bounds(self.duration_us)
        r = self.cluster_radius
        # object pixels are round(centre) +- r
        if round(x0) - r < 0 or round(y0) - r < 0 or round(x1) + r >= self.geom.width or round(y1) + r >= self.geom.height:
            raise ValueError(
                f"trajectory (+- radius {r}) leaves the {self.geom.width}x{self.geom.height} sensor: "
                f"x in [{x0:.1f}, {x1:.1f}], y in [{y0:.1f}, {y1:.1f}]"
            )


def pendulum_scene(
    geom: SensorGeometry = SensorGeometry(128, 128),
    duration_us: int = 5_000_000,
    signal_rate: float = 20_000,
    noise_rate: float = 20_000,
    cluster_radius: int = 2,
    seed: int = 0,
) -> SceneConfig:
    """A ball swinging across the middle of the sensor, one swing per second."""
    cx = (geom.width - 1) / 2
    amplitude = 0.3 * geom.width
    cy = 0.7 * (geom.height - 1)
    return SceneConfig(
        geom=geom,
        duration_us=duration_us,
        signal_rate=signal_rate,
        noise_rate=noise_rate,
        trajectory=Pendulum((cx, cy), amplitude, 1_000_000),
        cluster_radius=cluster_radius,
        seed=seed,
    )


def _arrivals(rng: np.random.Generator, rate: float, duration_us: int) -> np.ndarray:
    """Integer microsecond timestamps of a Poisson process on [0, duration)."""
    if rate <= 0 or duration_us <= 0:
        return np.empty(0, dtype=np.int64)
    scale = 1e6 / rate
    expected = rate * duration_us * 1e-6
    chunk = int(expected + 6 * math.sqrt(expected) + 16)
    parts, total = [], 0.0
    while total < duration_us:
        gaps = rng.exponential(scale, chunk)
        c = total + np.cumsum(gaps)
        parts.append(c)
        total = float(c[-1])
    times = np.concatenate(parts)
    times = times[times < duration_us]
    return np.floor(times).astype(np.int64)


def generate(cfg: SceneConfig) -> list[LabeledEvent]:
    rng = np.random.default_rng(cfg.seed)
    geom, r = cfg.geom, cfg.cluster_radius

    st = _arrivals(rng, cfg.signal_rate, cfg.duration_us)
    off = rng.integers(-r, r + 1, size=(st.size, 2))
    cx, cy = cfg.trajectory.position(st)
    sx = np.rint(cx).astype(np.int64) + off[:, 0]
    sy = np.rint(cy).astype(np.int64) + off[:, 1]
    vx, vy = _velocity(cfg.trajectory, st)
    # leading side of the moving object brightens (ON), trailing side darkens
    lead = off[:, 0] * vx + off[:, 1] * vy
    sp = np.where(lead >= 0, Polarity.ON, Polarity.OFF)

    nt = _arrivals(rng, cfg.noise_rate, cfg.duration_us)
    pix = rng.integers(0, geom.n_pixels, size=nt.size)
    nx, ny = pix % geom.width, pix // geom.width
    npol = rng.integers(0, 2, size=nt.size)

    t = np.concatenate([st, nt])
    x = np.concatenate([sx, nx])
    y = np.concatenate([sy, ny])
    p = np.concatenate([sp, npol])
    lab = np.concatenate([np.ones(st.size, np.int64), np.zeros(nt.size, np.int64)])
    order = np.argsort(t, kind="stable")

    cols = [a[order].tolist() for a in (t, x, y, p, lab)]
    real, noise = Label.REAL, Label.NOISE
    return [
        LabeledEvent(Event(ti, xi, yi, pi), real if li else noise)
        for ti, xi, yi, pi, li in zip(*cols)
    ]


@dataclass(frozen=True)
class Scores:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def recall(self) -> float:
        """True-positive rate; nan without real events."""
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else math.nan

    true_positive_rate = recall

    @property
    def false_positive_rate(self) -> float:
        return self.fp / (self.fp + self.tn) if self.fp + self.tn else math.nan

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else math.nan

    def as_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "true_positive_rate": self.recall,
            "false_positive_rate": self.false_positive_rate,
            "precision": self.precision,
            "recall": self.recall,
        }


def score(truth: Sequence[LabeledEvent], verdicts: Sequence[int]) -> Scores:
    """Confusion counts with REAL as the positive class."""
    if len(truth) != len(verdicts):
        raise ValueError(f"length mismatch: {len(truth)} labels vs {len(verdicts)} verdicts")
    tp = fp = tn = fn = 0
    for le, v in zip(truth, verdicts):
        if le.label:
            if v:
                tp += 1
            else:
                fn += 1
        elif v:
            fp += 1
        else:
            tn += 1
    return Scores(tp, fp, tn, fn)
