"""
SeqXFilter: spatio-temporal correlation against a window of past events.

Instead of a timestamp memory per pixel, the filter keeps only the (x, y)
coordinates of the X most recent events.  Time is implicit in stream order.
For each event it computes the normalised distance to every window slot,

    D = |dx| / M + |dy| / N,

reduces them with an aggregation function (MIN by default), passes the event
if the result is strictly below ``sigma``, then overwrites the oldest slot
with the event's coordinates.  State is 32*X bits whatever the sensor size.

The first X events of a stream have no full window and pass unconditionally.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .events import Event, Label, SensorGeometry

LARGE_SENSOR_PIXELS = 300_000


class Aggregation(str, Enum):
    MIN = "min"
    MAX = "max"
    AVG = "avg"
    WAVG = "wavg"


DEFAULT_WAVG_WEIGHTS = {2: (3.0, 1.0)}


@dataclass(frozen=True)
class SeqXConfig:
    """Filter parameters.

    ``weights`` applies to WAVG only and is ordered by recency: ``weights[0]``
    multiplies the distance to the most recent window event.
    ``update_on_real`` stores only passed events in the window (after warm-up);
    by default every event is stored regardless of its verdict.
    """

    window_length: int = 2
    sigma: float = 0.05
    aggregation: Aggregation = Aggregation.MIN
    weights: Optional[tuple[float, ...]] = None
    update_on_real: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "aggregation", Aggregation(self.aggregation))
        if self.window_length < 1:
            raise ValueError("window_length must be >= 1")
        if not 0 < self.sigma <= 2:
            raise ValueError(f"sigma must be in (0, 2], got {self.sigma}")
        if self.aggregation is Aggregation.WAVG:
            w = self.weights
            if w is None:
                w = DEFAULT_WAVG_WEIGHTS.get(self.window_length)
                if w is None:
                    raise ValueError(f"WAVG needs {self.window_length} explicit weights")
            w = tuple(float(a) for a in w)
            if len(w) != self.window_length:
                raise ValueError(f"expected {self.window_length} weights, got {len(w)}")
            if any(not a > 0 for a in w):
                raise ValueError("weights must be positive")
            object.__setattr__(self, "weights", w)

    @classmethod
    def default_for(cls, geom: SensorGeometry, **overrides) -> "SeqXConfig":
        """X=2, MIN, sigma=0.05 (0.005 on sensors above 300k pixels)."""
        sigma = 0.005 if geom.n_pixels > LARGE_SENSOR_PIXELS else 0.05
        return cls(**{"sigma": sigma, **overrides})


def spatial_distance(a: Event, b: Event, geom: SensorGeometry) -> float:
    """Normalised Manhattan distance ``|dx|/M + |dy|/N``, in [0, 2).

    Evaluated as ``(|dx|*N + |dy|*M) / (M*N)`` so the result is the correctly
    rounded value of the exact rational.
    """
    return _scaled_distance(a.x, a.y, b.x, b.y, geom.width, geom.height) / geom.n_pixels


def _scaled_distance(x0: int, y0: int, x1: int, y1: int, m: int, n: int) -> int:
    return abs(x0 - x1) * n + abs(y0 - y1) * m


def aggregate(
    distances: Sequence[float],
    mode: Aggregation | str,
    weights: Optional[Sequence[float]] = None,
) -> float:
    """Reduce the window distances (most recent first) to one score.

    WAVG divides the weighted sum by the window length, not by the weight sum.
    """
    mode = Aggregation(mode)
    if not distances:
        raise ValueError("no distances to aggregate")
    if mode is Aggregation.MIN:
        return min(distances)
    if mode is Aggregation.MAX:
        return max(distances)
    if mode is Aggregation.AVG:
        return sum(distances) / len(distances)
    if weights is None or len(weights) != len(distances):
        raise ValueError(
            f"WAVG needs {len(distances)} weights, got {None if weights is None else len(weights)}"
        )
    return sum(d * a for d, a in zip(distances, weights)) / len(distances)


class PastEventWindow:
    """Ring of X coordinate pairs; ``counter`` indexes the oldest slot."""

    __slots__ = ("length", "slots", "counter", "filled")

    def __init__(self, length: int):
        if length < 1:
            raise ValueError("window length must be >= 1")
        self.length = length
        self.slots = array("H", bytes(4 * length))  # x0, y0, x1, y1, ...
        self.counter = 0
        self.filled = 0

    @property
    def full(self) -> bool:
        return self.filled == self.length

    @property
    def size_bits(self) -> int:
        return self.slots.itemsize * len(self.slots) * 8

    def write(self, x: int, y: int) -> None:
        i = 2 * self.counter
        self.slots[i] = x
        self.slots[i + 1] = y
        self.counter = (self.counter + 1) % self.length
        if self.filled < self.length:
            self.filled += 1

    def recent(self) -> list[tuple[int, int]]:
        """Stored coordinates, most recent first."""
        out = []
        for j in range(1, self.filled + 1):
            i = 2 * ((self.counter - j) % self.length)
            out.append((self.slots[i], self.slots[i + 1]))
        return out

    def reset(self) -> None:
        self.slots = array("H", bytes(4 * self.length))
        self.counter = 0
        self.filled = 0


class SeqXFilter:
    """Reference (floating-point) SeqXFilter."""

    name = "seqx"

    def __init__(self, geom: SensorGeometry, config: Optional[SeqXConfig] = None):
        self.geom = geom
        self.config = config or SeqXConfig.default_for(geom)
        self.window = PastEventWindow(self.config.window_length)

    def reset(self) -> None:
        self.window.reset()

    @property
    def state_size_bits(self) -> int:
        return self.window.size_bits

    def score(self, e: Event) -> float:
        """Aggregated distance from ``e`` to the full window (no state change)."""
        m, n = self.geom.width, self.geom.height
        mn = m * n
        dists = [_scaled_distance(e.x, e.y, wx, wy, m, n) / mn for wx, wy in self.window.recent()]
        cfg = self.config
        return aggregate(dists, cfg.aggregation, cfg.weights)

    def check(self, e: Event) -> Label:
        self.geom.check(e)
        win = self.window
        if not win.full:
            win.write(e.x, e.y)
            return Label.REAL
        verdict = Label.REAL if self.score(e) < self.config.sigma else Label.NOISE
        if verdict is Label.REAL or not self.config.update_on_real:
            win.write(e.x, e.y)
        return verdict


def scaled_threshold(sigma: float, geom: SensorGeometry) -> int:
    """Integer threshold for the division-free check: ``floor(sigma*M*N)``.

    Products within 1e-9 (relative) of an integer are snapped to it, so a sigma
    such as ``k / (M*N)`` yields exactly ``k`` despite float rounding.
    """
    t = sigma * geom.n_pixels
    r = round(t)
    if abs(t - r) <= 1e-9 * max(1.0, abs(t)):
        return int(r)
    return math.floor(t)


class ScaledSeqXFilter:
    """Division-free SeqXFilter (MIN aggregation only).

    Compares ``|dx|*N + |dy|*M`` against a threshold pre-scaled by ``M*N``,
    all in integers.  Identical to :class:`SeqXFilter` whenever ``sigma*M*N``
    is integral; otherwise it may reject events whose real distance lies less
    than one integer step ``1/(M*N)`` below ``sigma``.
    """

    name = "seqx-scaled"

    def __init__(self, geom: SensorGeometry, config: Optional[SeqXConfig] = None):
        self.geom = geom
        self.config = config or SeqXConfig.default_for(geom)
        if self.config.aggregation is not Aggregation.MIN:
            raise ValueError("the scaled path supports MIN aggregation only")
        self.threshold = scaled_threshold(self.config.sigma, geom)
        self.window = PastEventWindow(self.config.window_length)

    def reset(self) -> None:
        self.window.reset()

    @property
    def state_size_bits(self) -> int:
        return self.window.size_bits

    def check(self, e: Event) -> Label:
        self.geom.check(e)
        win = self.window
        if not win.full:
            win.write(e.x, e.y)
            return Label.REAL
        m, n = self.geom.width, self.geom.height
        x, y = e.x, e.y
        s = win.slots
        best = min(abs(x - s[i]) * n + abs(y - s[i + 1]) * m for i in range(0, len(s), 2))
        verdict = Label.REAL if best < self.threshold else Label.NOISE
        if verdict is Label.REAL or not self.config.update_on_real:
            win.write(x, y)
        return verdict


def make_seqx(geom: SensorGeometry, config: Optional[SeqXConfig] = None, scaled: bool = False):
    return (ScaledSeqXFilter if scaled else SeqXFilter)(geom, config)


def state_size_bits(cfg: SeqXConfig) -> int:
    """Coordinate payload of the window: 16 bits per coordinate, 2 per slot."""
    return 32 * cfg.window_length


# -- operation accounting -----------------------------------------------------


@dataclass(frozen=True)
class OpCount:
    additions: int
    divisions: int
    comparisons: int
    writes: int


def op_count(cfg: SeqXConfig) -> OpCount:
    """Per-event arithmetic of the steady-state MIN check, excluding the
    counter update.

    Each slot costs two coordinate differences and one sum (3 additions) and
    one normalising division; X-1 comparisons pick the minimum and one more
    tests it against sigma; storing the event is two writes.
    """
    if cfg.aggregation is not Aggregation.MIN:
        raise ValueError("operation count is defined for MIN aggregation")
    x = cfg.window_length
    return OpCount(additions=3 * x, divisions=x, comparisons=x, writes=2)


@dataclass
class OpCounter:
    additions: int = 0
    divisions: int = 0
    comparisons: int = 0
    writes: int = 0
    multiplications: int = 0
    _log: list = field(default_factory=list, repr=False)

    def add(self, a, b):
        self.additions += 1
        return a + b

    def sub(self, a, b):
        self.additions += 1
        return a - b

    def mul(self, a, b):
        self.multiplications += 1
        return a * b

    def div(self, a, b):
        self.divisions += 1
        return a / b

    def lt(self, a, b) -> bool:
        self.comparisons += 1
        return a < b

    def store(self, buf, i, v) -> None:
        self.writes += 1
        buf[i] = v

    def snapshot(self) -> OpCount:
        return OpCount(self.additions, self.divisions, self.comparisons, self.writes)


def instrumented_check(
    window: PastEventWindow,
    cfg: SeqXConfig,
    e: Event,
    geom: SensorGeometry,
    ops: OpCounter,
) -> Label:
    """Steady-state MIN check with every arithmetic step routed through ``ops``.

    Multiplications by the constant sensor dimensions are tallied separately
    (they are not part of the add/div/cmp/write budget).  The counter update
    at the end is not counted.
    """
    if cfg.aggregation is not Aggregation.MIN:
        raise ValueError("instrumented path supports MIN only")
    if not window.full:
        raise ValueError("instrumented path models the steady state only")
    m, n = geom.width, geom.height
    mn = m * n
    s = window.slots
    best = None
    for j in range(window.length):
        dx = ops.sub(e.x, s[2 * j])
        dy = ops.sub(e.y, s[2 * j + 1])
        d = ops.div(ops.add(ops.mul(abs(dx), n), ops.mul(abs(dy), m)), mn)
        if best is None or ops.lt(d, best):
            best = d
    verdict = Label.REAL if ops.lt(best, cfg.sigma) else Label.NOISE
    i = 2 * window.counter
    ops.store(s, i, e.x)
    ops.store(s, i + 1, e.y)
    window.counter = (window.counter + 1) % window.length
    return verdict
