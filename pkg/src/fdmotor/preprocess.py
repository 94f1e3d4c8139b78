"""Signal conditioning: alignment, scaling, truncation, derivative, FFT.

The chain applied to every record is

    align (first upward zero crossing) -> min-max scale -> truncate
        -> derivative and/or one-sided magnitude spectrum

Scaling uses each signal's own extrema so that signals recorded at different
loads become comparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import ConstantSignal, DimensionError, NoZeroCrossing, TooShort
from .fda import SampleGrid
from .records import SignalRecord


@dataclass(frozen=True)
class PreprocessConfig:
    truncate_len: int = 750
    target_range: Tuple[float, float] = (-1.0, 1.0)
    derivative: bool = False
    signature: bool = False
    # Search the crossing on the mean-removed signal; needed for strictly
    # positive channels such as active power.
    center_for_alignment: bool = False

    def __post_init__(self):
        lo, hi = self.target_range
        if not lo < hi:
            raise ValueError(f"target range must satisfy lo < hi, got {self.target_range}")
        if self.truncate_len < 2:
            raise ValueError("truncate_len must be at least 2")


@dataclass(frozen=True, eq=False)
class Signature:
    """One-sided magnitude spectrum."""

    freqs: np.ndarray
    magnitudes: np.ndarray

    def __len__(self) -> int:
        return self.freqs.size

    def band(self, lo: float, hi: float, include_lo: bool = False) -> "Signature":
        keep = (self.freqs > lo) & (self.freqs <= hi)
        if include_lo:
            keep |= self.freqs == lo
        return Signature(self.freqs[keep], self.magnitudes[keep])


@dataclass(frozen=True, eq=False)
class PreprocessedSignal:
    signal: np.ndarray
    grid: SampleGrid
    shift: int
    derivative: Optional[np.ndarray] = None
    signature: Optional[Signature] = None


def align_first_zero_crossing(samples, center: bool = False) -> Tuple[np.ndarray, int]:
    """Drop samples before the first negative-to-nonnegative transition.

    Returns the suffix starting at the first index ``i >= 1`` with
    ``samples[i-1] < 0 <= samples[i]`` together with ``i``. With ``center``
    the test is made on ``samples - mean(samples)`` while the returned suffix
    keeps the original values.
    """
    x = np.asarray(samples, dtype=float)
    probe = x - x.mean() if center and x.size else x
    hits = np.flatnonzero((probe[:-1] < 0) & (probe[1:] >= 0))
    if hits.size == 0:
        raise NoZeroCrossing("no negative-to-nonnegative transition in signal")
    i = int(hits[0]) + 1
    return x[i:], i


def scale_minmax(samples, target_range: Tuple[float, float] = (-1.0, 1.0)) -> np.ndarray:
    """Affine map sending min(samples) to ``lo`` and max(samples) to ``hi``."""
    x = np.asarray(samples, dtype=float)
    lo, hi = target_range
    xmin, xmax = x.min(), x.max()
    if not xmax > xmin:
        raise ConstantSignal("cannot scale a constant signal")
    u = (x - xmin) / (xmax - xmin)
    out = np.clip(lo + (hi - lo) * u, lo, hi)
    out[x == xmin] = lo
    out[x == xmax] = hi
    return out


def finite_difference_derivative(samples, grid) -> np.ndarray:
    """Central differences inside, one-sided differences at the two ends."""
    x = np.asarray(samples, dtype=float)
    t = grid.points if isinstance(grid, SampleGrid) else np.asarray(grid, dtype=float)
    if x.size < 3 or t.size != x.size:
        raise DimensionError(f"need >= 3 samples on a matching grid, got {x.size}/{t.size}")
    d = np.empty_like(x)
    d[1:-1] = (x[2:] - x[:-2]) / (t[2:] - t[:-2])
    d[0] = (x[1] - x[0]) / (t[1] - t[0])
    d[-1] = (x[-1] - x[-2]) / (t[-1] - t[-2])
    return d


def fft_signature(samples, fs: float) -> Signature:
    """One-sided magnitude spectrum ``|DFT_k| / N`` with non-edge bins doubled.

    No window and no zero padding. Bins ``0`` and (for even ``N``) ``N/2``
    are not doubled.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 2 or fs <= 0:
        raise ValueError(f"need >= 2 samples and fs > 0, got {n} and {fs}")
    mags = np.abs(np.fft.rfft(x)) / n
    k = np.arange(mags.size)
    mags[(k > 0) & (2 * k < n)] *= 2
    return Signature(k * (fs / n), mags)


def time_grid(n: int, fs: float) -> SampleGrid:
    return SampleGrid.uniform(n, 1.0 / fs)


def preprocess_signal(record: SignalRecord, cfg: PreprocessConfig = PreprocessConfig()
                      ) -> PreprocessedSignal:
    aligned, shift = align_first_zero_crossing(record.samples, cfg.center_for_alignment)
    if aligned.size < cfg.truncate_len:
        raise TooShort(
            f"{aligned.size} samples after alignment, need {cfg.truncate_len}"
        )
    scaled = scale_minmax(aligned, cfg.target_range)
    x = scaled[: cfg.truncate_len]
    grid = time_grid(cfg.truncate_len, record.fs)
    deriv = finite_difference_derivative(x, grid) if cfg.derivative else None
    sig = fft_signature(x, record.fs) if cfg.signature else None
    return PreprocessedSignal(signal=x, grid=grid, shift=shift, derivative=deriv,
                              signature=sig)
