"""
Aggregation-function study.

For a labelled stream, every event past the first X gets a score
f(D_1, ..., D_X) from its distances to the X immediately preceding raw
events (the same window the filter sees when every event is stored).  Scores
are histogrammed separately for REAL and NOISE events, and three rules pick
the aggregation that best isolates real events in the first bin:

1. the first bin must be the mode of the real-event histogram;
2. survivors are ranked by the real:noise ratio in the first bin;
3. among survivors whose ratio is within ``tie_tolerance`` (relative) of the
   best, the one with the most real events in the first bin wins.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, TextIO

import numpy as np

from .events import LabeledEvent, SensorGeometry
from .seqx import DEFAULT_WAVG_WEIGHTS, Aggregation

DEFAULT_BINS = 20
DEFAULT_RANGE = (0.0, 0.5)
DEFAULT_TIE_TOLERANCE = 0.05


def _columns(labeled: Sequence[LabeledEvent]):
    if not labeled:
        return (np.empty(0, np.int64),) * 3
    arr = np.asarray([(le.event.x, le.event.y, int(le.label)) for le in labeled], dtype=np.int64)
    return arr[:, 0], arr[:, 1], arr[:, 2]


def window_distances(labeled: Sequence[LabeledEvent], geom: SensorGeometry, window: int):
    """Distances to the previous ``window`` events, shape (n - window, window).

    Column j-1 holds D_{n,n-j}; row k corresponds to event ``window + k``.
    Also returns the labels of those events.
    """
    x, y, lab = _columns(labeled)
    n = len(x)
    if n <= window:
        return np.empty((0, window)), np.empty(0, np.int64)
    m, h = geom.width, geom.height
    cur = slice(window, n)
    d = np.empty((n - window, window))
    for j in range(1, window + 1):
        prev = slice(window - j, n - j)
        num = np.abs(x[cur] - x[prev]) * h + np.abs(y[cur] - y[prev]) * m
        d[:, j - 1] = num / (m * h)
    return d, lab[cur]


def apply_aggregation(d: np.ndarray, mode: Aggregation | str, weights=None) -> np.ndarray:
    mode = Aggregation(mode)
    if mode is Aggregation.MIN:
        return d.min(axis=1)
    if mode is Aggregation.MAX:
        return d.max(axis=1)
    if mode is Aggregation.AVG:
        return d.mean(axis=1)
    w = np.asarray(weights if weights is not None else DEFAULT_WAVG_WEIGHTS[d.shape[1]], dtype=np.float64)
    if w.shape != (d.shape[1],):
        raise ValueError(f"expected {d.shape[1]} weights, got {w.size}")
    return d @ w / d.shape[1]


@dataclass(frozen=True, eq=False)
class SplitHistogram:
    bin_edges: np.ndarray
    real_counts: np.ndarray
    noise_counts: np.ndarray
    real_overflow: int = 0  # scores at or beyond the last edge
    noise_overflow: int = 0

    @property
    def total(self) -> int:
        return int(self.real_counts.sum() + self.noise_counts.sum()) + self.real_overflow + self.noise_overflow

    def to_csv(self, sink: TextIO) -> None:
        w = csv.writer(sink, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "real_count", "noise_count"])
        e = self.bin_edges
        for i in range(len(self.real_counts)):
            w.writerow([repr(float(e[i])), repr(float(e[i + 1])), int(self.real_counts[i]), int(self.noise_counts[i])])
        w.writerow([repr(float(e[-1])), "inf", self.real_overflow, self.noise_overflow])


def histogram_scores(
    scores: np.ndarray, labels: np.ndarray, bins: int = DEFAULT_BINS, range: tuple[float, float] = DEFAULT_RANGE
) -> SplitHistogram:
    if bins < 2:
        raise ValueError("need at least 2 bins")
    lo, hi = range
    edges = np.linspace(lo, hi, bins + 1)
    # half-open bins [lo, hi) so the last regular bin excludes hi
    idx = np.floor((scores - lo) / (hi - lo) * bins).astype(np.int64)
    idx = np.clip(idx, 0, bins)
    real = np.bincount(idx[labels == 1], minlength=bins + 1)
    noise = np.bincount(idx[labels == 0], minlength=bins + 1)
    return SplitHistogram(edges, real[:bins], noise[:bins], int(real[bins]), int(noise[bins]))


def build_histogram(
    labeled: Sequence[LabeledEvent],
    geom: SensorGeometry,
    window: int = 2,
    mode: Aggregation | str = Aggregation.MIN,
    bins: int = DEFAULT_BINS,
    range: tuple[float, float] = DEFAULT_RANGE,
    weights: Optional[Sequence[float]] = None,
) -> SplitHistogram:
    d, lab = window_distances(labeled, geom, window)
    if len(lab) == 0:
        raise ValueError(f"no events past the first {window}")
    return histogram_scores(apply_aggregation(d, mode, weights), lab, bins, range)


def build_histograms(
    labeled: Sequence[LabeledEvent],
    geom: SensorGeometry,
    window: int = 2,
    modes: Sequence[Aggregation | str] = tuple(Aggregation),
    bins: int = DEFAULT_BINS,
    range: tuple[float, float] = DEFAULT_RANGE,
    weights: Optional[Sequence[float]] = None,
) -> dict[Aggregation, SplitHistogram]:
    """One histogram per mode, sharing the distance computation."""
    d, lab = window_distances(labeled, geom, window)
    if len(lab) == 0:
        raise ValueError(f"no events past the first {window}")
    return {
        Aggregation(m): histogram_scores(apply_aggregation(d, m, weights), lab, bins, range) for m in modes
    }


@dataclass(frozen=True)
class ModeAudit:
    first_bin_real: int
    first_bin_noise: int
    real_ratio: float  # real / noise in the first bin (inf when noise is 0)
    rule1_pass: bool
    rule2_rank: Optional[int]  # 1 = best ratio among candidates
    rule3_rank: Optional[int]  # 1 = selected


@dataclass(frozen=True)
class RuleVerdict:
    per_function: dict[Aggregation, ModeAudit]
    selected: Aggregation
    rule1_fallback: bool = False  # True when no mode passed rule 1
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE
    near_ties: tuple[Aggregation, ...] = field(default=())

    def report(self) -> str:
        lines = [
            f"{'mode':<6}{'bin0_real':>11}{'bin0_noise':>12}{'ratio':>10}{'rule1':>7}{'rule2':>7}{'rule3':>7}"
        ]
        for mode, a in self.per_function.items():
            r2 = "-" if a.rule2_rank is None else str(a.rule2_rank)
            r3 = "-" if a.rule3_rank is None else str(a.rule3_rank)
            lines.append(
                f"{mode.value:<6}{a.first_bin_real:>11}{a.first_bin_noise:>12}{a.real_ratio:>10.3f}"
                f"{'yes' if a.rule1_pass else 'no':>7}{r2:>7}{r3:>7}"
            )
        if self.rule1_fallback:
            lines.append("no mode passed rule 1; ranked all modes by rule 2")
        if len(self.near_ties) > 1:
            tied = ", ".join(m.value for m in self.near_ties)
            lines.append(f"ratios within {self.tie_tolerance:.0%}: {tied}; rule 3 decides")
        lines.append(f"selected: {self.selected.value}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "selected": self.selected.value,
            "rule1_fallback": self.rule1_fallback,
            "tie_tolerance": self.tie_tolerance,
            "near_ties": [m.value for m in self.near_ties],
            "per_function": {
                m.value: {
                    "first_bin_real": a.first_bin_real,
                    "first_bin_noise": a.first_bin_noise,
                    "real_ratio": a.real_ratio,
                    "rule1_pass": a.rule1_pass,
                    "rule2_rank": a.rule2_rank,
                    "rule3_rank": a.rule3_rank,
                }
                for m, a in self.per_function.items()
            },
        }


def _ratio(real: int, noise: int) -> float:
    if noise == 0:
        return math.inf if real else 0.0
    return real / noise


def _near(a: float, b: float, tol: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= tol * max(abs(a), abs(b))


def select_function(
    histograms: Mapping[Aggregation | str, SplitHistogram],
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE,
) -> RuleVerdict:
    if not histograms:
        raise ValueError("no histograms to compare")
    hs = {Aggregation(m): h for m, h in histograms.items()}
    edges = [h.bin_edges for h in hs.values()]
    if any(e.shape != edges[0].shape or not np.allclose(e, edges[0]) for e in edges):
        raise ValueError("histograms must share binning")

    stats = {}
    for m, h in hs.items():
        r0, n0 = int(h.real_counts[0]), int(h.noise_counts[0])
        rule1 = bool(r0 > 0 and r0 >= h.real_counts.max())
        stats[m] = (r0, n0, _ratio(r0, n0), rule1)

    candidates = [m for m in hs if stats[m][3]]
    fallback = not candidates
    if fallback:
        candidates = list(hs)

    by_ratio = sorted(candidates, key=lambda m: -stats[m][2])
    rule2_rank = {m: i + 1 for i, m in enumerate(by_ratio)}
    best_ratio = stats[by_ratio[0]][2]
    near = [m for m in by_ratio if _near(stats[m][2], best_ratio, tie_tolerance)]
    # rule 3 over the near-tie group; the rest keep their ratio order
    by_rule3 = sorted(near, key=lambda m: (-stats[m][0], rule2_rank[m]))
    by_rule3 += [m for m in by_ratio if m not in near]
    rule3_rank = {m: i + 1 for i, m in enumerate(by_rule3)}

    per = {
        m: ModeAudit(
            first_bin_real=stats[m][0],
            first_bin_noise=stats[m][1],
            real_ratio=stats[m][2],
            rule1_pass=stats[m][3],
            rule2_rank=rule2_rank.get(m),
            rule3_rank=rule3_rank.get(m),
        )
        for m in hs
    }
    return RuleVerdict(per, by_rule3[0], fallback, tie_tolerance, tuple(near))
