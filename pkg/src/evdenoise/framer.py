"""Fixed-count binary frames and PGM (P5) I/O."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import BinaryIO, Sequence

import numpy as np

from .events import Event, SensorGeometry

ACTIVE = 255
BASE_BUNDLE_SIZES = (1000, 3000, 5000)


@dataclass(frozen=True, eq=False)
class BinaryFrame:
    """``pixels`` is a (height, width) uint8 array of 0/255 values."""

    pixels: np.ndarray
    geom: SensorGeometry

    def __post_init__(self) -> None:
        px = self.pixels
        if px.shape != (self.geom.height, self.geom.width):
            raise ValueError(f"pixel shape {px.shape} does not match {self.geom}")
        if px.dtype != np.uint8:
            raise TypeError("pixels must be uint8")

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryFrame):
            return NotImplemented
        return self.geom == other.geom and np.array_equal(self.pixels, other.pixels)

    @property
    def active_count(self) -> int:
        return int(np.count_nonzero(self.pixels))

    @classmethod
    def blank(cls, geom: SensorGeometry) -> "BinaryFrame":
        return cls(np.zeros((geom.height, geom.width), dtype=np.uint8), geom)


def default_bundle_sizes(geom: SensorGeometry) -> tuple[int, int, int]:
    """(1k, 3k, 5k) events per frame, ten times that above 300k pixels."""
    k = 10 if geom.n_pixels > 300_000 else 1
    return tuple(k * c for c in BASE_BUNDLE_SIZES)


def accumulate(
    events: Sequence[Event],
    geom: SensorGeometry,
    count: int,
    keep_partial: bool = False,
) -> list[BinaryFrame]:
    """Split the stream into bundles of ``count`` events and render each as a
    frame where touched pixels are 255.  The trailing partial bundle is
    dropped unless ``keep_partial``.  Polarity is ignored.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    n = len(events)
    if n == 0:
        return []
    xy = np.asarray([(e.x, e.y) for e in events], dtype=np.int64)
    xs, ys = xy[:, 0], xy[:, 1]
    bad = np.flatnonzero((xs < 0) | (xs >= geom.width) | (ys < 0) | (ys >= geom.height))
    if bad.size:
        e = events[int(bad[0])]
        raise ValueError(f"event {int(bad[0])} at ({e.x}, {e.y}) outside {geom.width}x{geom.height}")

    n_frames = n // count + (1 if keep_partial and n % count else 0)
    frames = []
    for k in range(n_frames):
        sl = slice(k * count, (k + 1) * count)
        px = np.zeros((geom.height, geom.width), dtype=np.uint8)
        px[ys[sl], xs[sl]] = ACTIVE
        frames.append(BinaryFrame(px, geom))
    return frames


def write_pgm(frame: BinaryFrame, sink: BinaryIO) -> None:
    g = frame.geom
    sink.write(f"P5\n{g.width} {g.height}\n255\n".encode("ascii"))
    sink.write(np.ascontiguousarray(frame.pixels).tobytes())


_PGM_HEADER = re.compile(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s")


def read_pgm(source: BinaryIO) -> BinaryFrame:
    """Read an 8-bit P5 image written by :func:`write_pgm` (no comments)."""
    data = source.read()
    m = _PGM_HEADER.match(data)
    if not m:
        raise ValueError("not a binary PGM (P5) image")
    w, h, maxval = (int(v) for v in m.groups())
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    body = data[m.end() :]
    if len(body) != w * h:
        raise ValueError(f"expected {w * h} pixel bytes, got {len(body)}")
    px = np.frombuffer(body, dtype=np.uint8).reshape(h, w).copy()
    return BinaryFrame(px, SensorGeometry(w, h))


def frame_filename(index: int) -> str:
    return f"frame_{index:06d}.pgm"


def save_frames(frames: Sequence[BinaryFrame], directory: str | os.PathLike) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    paths = []
    for i, fr in enumerate(frames):
        path = os.path.join(directory, frame_filename(i))
        with open(path, "wb") as f:
            write_pgm(fr, f)
        paths.append(path)
    return paths


def load_frames(directory: str | os.PathLike) -> list[BinaryFrame]:
    names = sorted(n for n in os.listdir(directory) if re.fullmatch(r"frame_\d{6}\.pgm", n))
    frames = []
    for name in names:
        with open(os.path.join(directory, name), "rb") as f:
            frames.append(read_pgm(f))
    return frames
