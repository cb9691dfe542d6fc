"""
Core value types for event-camera streams.

An event is the quadruple (t, x, y, p) emitted by a DVS pixel: a microsecond
timestamp, the pixel column and row, and an ON/OFF polarity.  Streams are plain
Python sequences of :class:`Event`; every filter in the package consumes them in
order and never reorders them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, NamedTuple, Optional, Sequence

MAX_COORD = 0xFFFF  # coordinates are stored as unsigned 16-bit values


class Polarity(IntEnum):
    OFF = 0
    ON = 1


class Label(IntEnum):
    """Verdict / ground-truth tag for one event."""

    NOISE = 0
    REAL = 1


class Event(NamedTuple):
    t: int  # microseconds
    x: int
    y: int
    p: int = Polarity.ON


class LabeledEvent(NamedTuple):
    event: Event
    label: Label


@dataclass(frozen=True)
class SensorGeometry:
    """Output size of the sensor: ``width`` columns (M) by ``height`` rows (N)."""

    width: int
    height: int

    def __post_init__(self) -> None:
        for name in ("width", "height"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise TypeError(f"{name} must be an int, got {type(v).__name__}")
            if not 1 <= v <= MAX_COORD:
                raise ValueError(f"{name} must be in [1, {MAX_COORD}], got {v}")

    @property
    def n_pixels(self) -> int:
        return self.width * self.height

    def contains(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def check(self, e: Event) -> None:
        """Raise ``ValueError`` if ``e`` lies outside the sensor."""
        if not (0 <= e.x < self.width and 0 <= e.y < self.height):
            raise ValueError(
                f"event at ({e.x}, {e.y}) outside {self.width}x{self.height} sensor"
            )


@dataclass(frozen=True)
class ValidationReport:
    checked: int
    violation_index: Optional[int] = None
    reason: Optional[str] = None

    @property
    def valid(self) -> bool:
        return self.violation_index is None


def validate_stream(events: Iterable[Event], geom: SensorGeometry) -> ValidationReport:
    """Scan a stream for the first bounds or timestamp-order violation.

    Violations are reported, not raised.  ``checked`` counts the events examined,
    including the offending one.
    """
    prev_t = None
    n = 0
    for i, e in enumerate(events):
        n = i + 1
        if not geom.contains(e.x, e.y):
            return ValidationReport(n, i, f"({e.x}, {e.y}) out of bounds")
        if e.t < 0:
            return ValidationReport(n, i, f"negative timestamp {e.t}")
        if e.p not in (0, 1):
            return ValidationReport(n, i, f"invalid polarity {e.p}")
        if prev_t is not None and e.t < prev_t:
            return ValidationReport(n, i, f"timestamp decreased from {prev_t} to {e.t}")
        prev_t = e.t
    return ValidationReport(n)


def strip_labels(labeled: Sequence[LabeledEvent]) -> list[Event]:
    return [le.event for le in labeled]


def labels_of(labeled: Sequence[LabeledEvent]) -> list[Label]:
    return [le.label for le in labeled]
