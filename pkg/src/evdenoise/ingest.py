"""
Readers and writers for event streams and label sidecars.

Text format (UTF-8, LF)::

    WIDTH HEIGHT
    t,x,y,p
    ...

Binary format (little-endian)::

    b"EVN1" | width u16 | height u16 | event_count u64
    event_count x { t u64 | x u16 | y u16 | p u8 }      # 13 bytes each

Label sidecar: one ``1`` (REAL) or ``0`` (NOISE) per line.
"""

from __future__ import annotations

import os
import struct
from typing import BinaryIO, Iterable, Sequence, TextIO

import numpy as np

from .events import Event, Label, SensorGeometry

MAGIC = b"EVN1"
HEADER = struct.Struct("<4sHHQ")
RECORD_DTYPE = np.dtype([("t", "<u8"), ("x", "<u2"), ("y", "<u2"), ("p", "u1")])
RECORD_SIZE = RECORD_DTYPE.itemsize

assert HEADER.size == 16 and RECORD_SIZE == 13


class StreamFormatError(ValueError):
    """Malformed stream or sidecar.  ``line`` / ``record`` locate the fault."""

    def __init__(self, msg: str, *, line: int | None = None, record: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}: "
        elif record is not None:
            where = f"record {record}: "
        super().__init__(where + msg)
        self.line = line
        self.record = record


def _parse_int(tok: str, what: str, line: int) -> int:
    tok = tok.strip()
    if not tok.isdigit():
        raise StreamFormatError(f"bad {what} {tok!r}", line=line)
    return int(tok)


def _check_fields(geom: SensorGeometry, t: int, x: int, y: int, p: int, **where) -> None:
    if x >= geom.width:
        raise StreamFormatError(f"x={x} out of range for width {geom.width}", **where)
    if y >= geom.height:
        raise StreamFormatError(f"y={y} out of range for height {geom.height}", **where)
    if p not in (0, 1):
        raise StreamFormatError(f"polarity {p} not in {{0, 1}}", **where)
    if t > 0xFFFF_FFFF_FFFF_FFFF:
        raise StreamFormatError(f"timestamp {t} exceeds 64 bits", **where)


# -- text ---------------------------------------------------------------------


def read_text(source: TextIO) -> tuple[SensorGeometry, list[Event]]:
    header = source.readline()
    if not header.strip():
        raise StreamFormatError("missing 'WIDTH HEIGHT' header", line=1)
    parts = header.split()
    if len(parts) != 2:
        raise StreamFormatError(f"header must be 'WIDTH HEIGHT', got {header.strip()!r}", line=1)
    w, h = (_parse_int(s, "dimension", 1) for s in parts)
    try:
        geom = SensorGeometry(w, h)
    except ValueError as exc:
        raise StreamFormatError(str(exc), line=1) from None

    events = []
    for lineno, raw in enumerate(source, start=2):
        raw = raw.rstrip("\r\n")
        if not raw:
            continue
        fields = raw.split(",")
        if len(fields) != 4:
            raise StreamFormatError(f"expected 't,x,y,p', got {raw!r}", line=lineno)
        t, x, y, p = (_parse_int(f, n, lineno) for f, n in zip(fields, "txyp"))
        _check_fields(geom, t, x, y, p, line=lineno)
        events.append(Event(t, x, y, p))
    return geom, events


def write_text(geom: SensorGeometry, events: Iterable[Event], sink: TextIO) -> None:
    sink.write(f"{geom.width} {geom.height}\n")
    sink.writelines(f"{e.t},{e.x},{e.y},{int(e.p)}\n" for e in events)


# -- binary -------------------------------------------------------------------


def events_to_records(events: Sequence[Event]) -> np.ndarray:
    rec = np.empty(len(events), dtype=RECORD_DTYPE)
    if len(events):
        arr = np.asarray(events, dtype=np.uint64).reshape(-1, 4)
        rec["t"], rec["x"], rec["y"], rec["p"] = arr.T
    return rec


def records_to_events(rec: np.ndarray) -> list[Event]:
    cols = [rec[f].tolist() for f in ("t", "x", "y", "p")]
    return list(map(Event._make, zip(*cols)))


def read_binary(source: BinaryIO) -> tuple[SensorGeometry, list[Event]]:
    head = source.read(HEADER.size)
    if len(head) < 4 or head[:4] != MAGIC:
        raise StreamFormatError(f"bad magic {head[:4]!r}, expected {MAGIC!r}")
    if len(head) < HEADER.size:
        raise StreamFormatError("truncated header")
    _, w, h, count = HEADER.unpack(head)
    try:
        geom = SensorGeometry(w, h)
    except ValueError as exc:
        raise StreamFormatError(str(exc)) from None

    payload = source.read()
    expected = count * RECORD_SIZE
    if len(payload) < expected:
        idx = len(payload) // RECORD_SIZE
        raise StreamFormatError(
            f"truncated: header declares {count} events, payload holds {idx} complete",
            record=idx,
        )
    if len(payload) > expected:
        raise StreamFormatError(
            f"header declares {count} events but payload has {len(payload)} bytes "
            f"({len(payload) / RECORD_SIZE:g} records)"
        )
    rec = np.frombuffer(payload, dtype=RECORD_DTYPE, count=count)
    for name, limit in (("x", w), ("y", h), ("p", 2)):
        bad = np.flatnonzero(rec[name] >= limit)
        if bad.size:
            i = int(bad[0])
            r = rec[i]
            _check_fields(geom, int(r["t"]), int(r["x"]), int(r["y"]), int(r["p"]), record=i)
    return geom, records_to_events(rec)


def write_binary(geom: SensorGeometry, events: Sequence[Event], sink: BinaryIO) -> None:
    rec = events_to_records(events)
    sink.write(HEADER.pack(MAGIC, geom.width, geom.height, len(rec)))
    sink.write(rec.tobytes())


def binary_size(n_events: int) -> int:
    return HEADER.size + RECORD_SIZE * n_events


# -- labels -------------------------------------------------------------------


def read_labels(source: TextIO, n: int) -> list[Label]:
    labels = []
    for lineno, raw in enumerate(source, start=1):
        ch = raw.rstrip("\r\n")
        if ch == "1":
            labels.append(Label.REAL)
        elif ch == "0":
            labels.append(Label.NOISE)
        else:
            raise StreamFormatError(f"invalid label {ch!r}", line=lineno)
    if len(labels) != n:
        raise StreamFormatError(f"expected {n} labels, found {len(labels)}")
    return labels


def write_labels(labels: Iterable[int], sink: TextIO) -> None:
    sink.writelines("1\n" if lab else "0\n" for lab in labels)


# -- path helpers -------------------------------------------------------------


def sniff_format(path: str | os.PathLike) -> str:
    """Return ``"binary"`` if the file starts with the binary magic, else ``"text"``."""
    with open(path, "rb") as f:
        return "binary" if f.read(4) == MAGIC else "text"


def load_stream(path: str | os.PathLike, fmt: str = "auto") -> tuple[SensorGeometry, list[Event]]:
    if fmt == "auto":
        fmt = sniff_format(path)
    if fmt == "binary":
        with open(path, "rb") as f:
            return read_binary(f)
    if fmt == "text":
        with open(path, encoding="utf-8", newline="\n") as f:
            return read_text(f)
    raise ValueError(f"unknown format {fmt!r}")


def save_stream(
    path: str | os.PathLike, geom: SensorGeometry, events: Sequence[Event], fmt: str = "binary"
) -> None:
    if fmt == "binary":
        with open(path, "wb") as f:
            write_binary(geom, events, f)
    elif fmt == "text":
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            write_text(geom, events, f)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def load_labels(path: str | os.PathLike, n: int) -> list[Label]:
    with open(path, encoding="utf-8", newline="\n") as f:
        return read_labels(f, n)


def save_labels(path: str | os.PathLike, labels: Iterable[int]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        write_labels(labels, f)
