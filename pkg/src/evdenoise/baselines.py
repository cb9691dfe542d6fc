"""
Nearest-neighbour (NNb) background-activity filters with per-pixel,
per-group, and per-row/column timestamp memories.

All three pass an event when some stored neighbour timestamp satisfies
``e.t - ts < dt_us`` (strict).  Cells start EMPTY and never match while
EMPTY, so nothing passes before the memory has been written.

* :class:`Bs1Filter` -- one cell per pixel.  Each event writes its timestamp
  into its 8 neighbours' cells (not its own) and checks its own cell, i.e. it
  asks "did a neighbour fire recently?".  A pixel firing repeatedly on its
  own therefore never validates itself.
* :class:`Bs2Filter` -- one cell per s x s pixel group, holding the most
  recent event of the group; checks its own group and the 8 adjacent ones.
* :class:`Bs3Filter` -- one record per row and one per column, each holding
  the most recent event on that line.
"""

from __future__ import annotations

from typing import Iterable, Protocol, Sequence

import numpy as np

from .events import Event, Label, LabeledEvent, SensorGeometry

EMPTY = -1  # sentinel; valid timestamps are >= 0


class EventFilter(Protocol):
    geom: SensorGeometry

    def check(self, e: Event) -> Label: ...

    def reset(self) -> None: ...


class Bs1Filter:
    name = "bs1"

    def __init__(self, geom: SensorGeometry, dt_us: int = 1000):
        if dt_us <= 0:
            raise ValueError("dt_us must be positive")
        self.geom = geom
        self.dt_us = dt_us
        self.reset()

    def reset(self) -> None:
        self.last_ts = np.full((self.geom.height, self.geom.width), EMPTY, dtype=np.int64)

    @property
    def state_cells(self) -> int:
        return self.last_ts.size

    def check(self, e: Event) -> Label:
        self.geom.check(e)
        x, y, t = e.x, e.y, e.t
        grid = self.last_ts
        own = int(grid[y, x])
        ok = own != EMPTY and t - own < self.dt_us
        grid[max(y - 1, 0) : y + 2, max(x - 1, 0) : x + 2] = t
        grid[y, x] = own
        return Label.REAL if ok else Label.NOISE


class Bs2Filter:
    name = "bs2"

    def __init__(self, geom: SensorGeometry, dt_us: int = 2000, subsample: int = 2):
        if dt_us <= 0:
            raise ValueError("dt_us must be positive")
        if subsample < 1:
            raise ValueError("subsample factor must be >= 1")
        self.geom = geom
        self.dt_us = dt_us
        self.s = subsample
        self.reset()

    def reset(self) -> None:
        gh = -(-self.geom.height // self.s)
        gw = -(-self.geom.width // self.s)
        self.last_ts = np.full((gh, gw), EMPTY, dtype=np.int64)

    @property
    def state_cells(self) -> int:
        return self.last_ts.size

    def check(self, e: Event) -> Label:
        self.geom.check(e)
        gx, gy = e.x // self.s, e.y // self.s
        block = self.last_ts[max(gy - 1, 0) : gy + 2, max(gx - 1, 0) : gx + 2]
        # EMPTY cells give t - (-1) > t, so mask them explicitly
        ok = bool(np.any((block != EMPTY) & (e.t - block < self.dt_us)))
        self.last_ts[gy, gx] = e.t
        return Label.REAL if ok else Label.NOISE


class Bs3Filter:
    name = "bs3"

    def __init__(self, geom: SensorGeometry, dt_us: int = 1000):
        if dt_us <= 0:
            raise ValueError("dt_us must be positive")
        self.geom = geom
        self.dt_us = dt_us
        self.reset()

    def reset(self) -> None:
        w, h = self.geom.width, self.geom.height
        # per row: (ts, polarity, column); per column: (ts, polarity, row)
        self.row_ts = np.full(h, EMPTY, dtype=np.int64)
        self.row_pol = np.zeros(h, dtype=np.uint8)
        self.row_col = np.zeros(h, dtype=np.int64)
        self.col_ts = np.full(w, EMPTY, dtype=np.int64)
        self.col_pol = np.zeros(w, dtype=np.uint8)
        self.col_row = np.zeros(w, dtype=np.int64)

    @property
    def state_cells(self) -> int:
        return self.row_ts.size + self.col_ts.size

    def check(self, e: Event) -> Label:
        self.geom.check(e)
        x, y, t = e.x, e.y, e.t
        rt, ct = int(self.row_ts[y]), int(self.col_ts[x])
        ok = (rt != EMPTY and t - rt < self.dt_us and abs(int(self.row_col[y]) - x) <= 1) or (
            ct != EMPTY and t - ct < self.dt_us and abs(int(self.col_row[x]) - y) <= 1
        )
        self.row_ts[y], self.row_pol[y], self.row_col[y] = t, e.p, x
        self.col_ts[x], self.col_pol[x], self.col_row[x] = t, e.p, y
        return Label.REAL if ok else Label.NOISE


class PassAll:
    """Stub filter that accepts everything."""

    name = "pass"

    def __init__(self, geom: SensorGeometry):
        self.geom = geom

    def reset(self) -> None:
        pass

    def check(self, e: Event) -> Label:
        return Label.REAL


def run_filter(filt: EventFilter, events: Iterable[Event]) -> list[LabeledEvent]:
    """Tag every event with the filter's verdict, preserving order."""
    check = filt.check
    return [LabeledEvent(e, check(e)) for e in events]


def verdicts(filt: EventFilter, events: Iterable[Event]) -> list[Label]:
    check = filt.check
    return [check(e) for e in events]


def passed(labeled: Sequence[LabeledEvent]) -> list[Event]:
    return [le.event for le in labeled if le.label == Label.REAL]
