"""
PSNR and SSIM between frame sequences.

SSIM follows the canonical formulation: 11x11 Gaussian window (std 1.5),
K1=0.01, K2=0.03, L=255, averaged over window positions that lie fully inside
the frame.  PSNR of identical frames is ``math.inf``; such pairs are left out
of the mean PSNR and counted separately.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

import numpy as np
from scipy import ndimage

from .framer import BinaryFrame

DATA_RANGE = 255.0
K1, K2 = 0.01, 0.03
C1 = (K1 * DATA_RANGE) ** 2
C2 = (K2 * DATA_RANGE) ** 2
WINDOW_SIZE = 11
WINDOW_SIGMA = 1.5


def _pixels(f) -> np.ndarray:
    return f.pixels if isinstance(f, BinaryFrame) else np.asarray(f)


def _check_pair(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"geometry mismatch: {a.shape[::-1]} vs {b.shape[::-1]}")


def mse(reference, test) -> float:
    a = _pixels(reference).astype(np.float64)
    b = _pixels(test).astype(np.float64)
    _check_pair(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(reference, test) -> float:
    """``10*log10(255^2 / MSE)`` in dB; ``inf`` when the frames are identical."""
    err = mse(reference, test)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(DATA_RANGE**2 / err)


def gaussian_window(size: int = WINDOW_SIZE, sigma: float = WINDOW_SIGMA) -> np.ndarray:
    """Normalised 1-D Gaussian taps; the 2-D window is their outer product."""
    r = np.arange(size, dtype=np.float64) - (size - 1) / 2
    g = np.exp(-(r**2) / (2 * sigma**2))
    return g / g.sum()


def _local_mean(img: np.ndarray, taps: np.ndarray) -> np.ndarray:
    out = ndimage.correlate1d(img, taps, axis=0, mode="constant")
    out = ndimage.correlate1d(out, taps, axis=1, mode="constant")
    p = len(taps) // 2
    return out[p:-p, p:-p] if p else out


def ssim_map(reference, test) -> np.ndarray:
    a = _pixels(reference).astype(np.float64)
    b = _pixels(test).astype(np.float64)
    _check_pair(a, b)
    if min(a.shape) < WINDOW_SIZE:
        raise ValueError(f"frame {a.shape[1]}x{a.shape[0]} smaller than the {WINDOW_SIZE}x{WINDOW_SIZE} window")
    taps = gaussian_window()
    mu_a, mu_b = _local_mean(a, taps), _local_mean(b, taps)
    var_a = _local_mean(a * a, taps) - mu_a * mu_a
    var_b = _local_mean(b * b, taps) - mu_b * mu_b
    cov = _local_mean(a * b, taps) - mu_a * mu_b
    num = (2 * mu_a * mu_b + C1) * (2 * cov + C2)
    den = (mu_a * mu_a + mu_b * mu_b + C1) * (var_a + var_b + C2)
    return num / den


def ssim(reference, test) -> float:
    return float(ssim_map(reference, test).mean())


@dataclass(frozen=True)
class MetricReport:
    per_frame: list[tuple[float, float]]  # (psnr_db, ssim)
    mean_psnr: float  # over finite entries; inf if every pair is identical
    mean_ssim: float
    identical_count: int

    def to_csv(self, sink: TextIO) -> None:
        w = csv.writer(sink, lineterminator="\n")
        w.writerow(["frame_index", "psnr_db", "ssim"])
        for i, (p, s) in enumerate(self.per_frame):
            w.writerow([i, _fmt(p), _fmt(s)])
        w.writerow(["mean", _fmt(self.mean_psnr), _fmt(self.mean_ssim)])


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf"
    if math.isnan(v):
        return "nan"
    return repr(float(v))


def compare_pipelines(
    frames_a: Sequence[BinaryFrame],
    frames_b: Sequence[BinaryFrame],
    workers: Optional[int] = None,
) -> MetricReport:
    """Pairwise PSNR/SSIM of two equally long frame sequences.

    ``frames_a`` plays the reference role (e.g. baseline-filter frames).
    ``workers`` > 1 evaluates pairs on a thread pool.
    """
    if len(frames_a) != len(frames_b):
        raise ValueError(f"frame count mismatch: {len(frames_a)} vs {len(frames_b)}")

    def pair(ab):
        return psnr(*ab), ssim(*ab)

    pairs = list(zip(frames_a, frames_b))
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            per_frame = list(ex.map(pair, pairs))
    else:
        per_frame = [pair(ab) for ab in pairs]

    finite = [p for p, _ in per_frame if math.isfinite(p)]
    return MetricReport(
        per_frame=per_frame,
        mean_psnr=(math.fsum(finite) / len(finite)) if finite else (math.inf if per_frame else math.nan),
        mean_ssim=math.fsum(s for _, s in per_frame) / len(per_frame) if per_frame else math.nan,
        identical_count=len(per_frame) - len(finite),
    )
