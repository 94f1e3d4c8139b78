"""Measurement records and the condition tags of the motor corpus."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import UnknownCondition

LOAD_LEVELS = (0, 20, 40, 60, 80)


class FaultKind(enum.Enum):
    HEALTHY = "healthy"
    BROKEN_BARS = "broken_bars"
    LOAD_OSCILLATION = "load_oscillation"


class Channel(str, enum.Enum):
    CURRENT_1 = "current1"
    CURRENT_2 = "current2"
    VOLTAGE_1 = "voltage1"
    VOLTAGE_2 = "voltage2"
    IAP = "iap"

    @property
    def is_current(self) -> bool:
        return self in (Channel.CURRENT_1, Channel.CURRENT_2)


@dataclass(frozen=True)
class FaultSpec:
    """One motor condition at one load level.

    ``n_bars`` is used for broken bars (1..3); ``osc_freq`` (1 or 2 Hz) and
    ``level`` ("A" or "B") for load oscillations.
    """

    kind: FaultKind = FaultKind.HEALTHY
    n_bars: int = 0
    osc_freq: int = 0
    level: Optional[str] = None
    load_pct: int = 0

    def __post_init__(self):
        if self.load_pct not in LOAD_LEVELS:
            raise ValueError(f"load must be one of {LOAD_LEVELS}, got {self.load_pct}")
        if self.kind is FaultKind.BROKEN_BARS and self.n_bars not in (1, 2, 3):
            raise ValueError(f"broken bars must be 1, 2 or 3, got {self.n_bars}")
        if self.kind is FaultKind.LOAD_OSCILLATION:
            if self.osc_freq not in (1, 2) or self.level not in ("A", "B"):
                raise ValueError(f"bad load oscillation {self.osc_freq} Hz / {self.level}")

    @property
    def tag(self) -> str:
        if self.kind is FaultKind.HEALTHY:
            return "HM"
        if self.kind is FaultKind.BROKEN_BARS:
            return f"{self.n_bars}BB"
        return f"SS_{self.osc_freq}_{self.level}"

    @classmethod
    def from_tag(cls, tag: str, load_pct: int = 0) -> "FaultSpec":
        if tag == "HM":
            return cls(FaultKind.HEALTHY, load_pct=load_pct)
        if tag in ("1BB", "2BB", "3BB"):
            return cls(FaultKind.BROKEN_BARS, n_bars=int(tag[0]), load_pct=load_pct)
        if tag in ("SS_1_A", "SS_1_B", "SS_2_A", "SS_2_B"):
            return cls(FaultKind.LOAD_OSCILLATION, osc_freq=int(tag[3]), level=tag[5],
                       load_pct=load_pct)
        raise UnknownCondition(f"unknown condition tag {tag!r}")


CONDITION_TAGS = ("HM", "1BB", "2BB", "3BB", "SS_1_A", "SS_1_B", "SS_2_A", "SS_2_B")


def fault_group(tag: str) -> str:
    """Diagnosis class of a condition tag: Healthy, BrokenBars or LoadOsc_<f>Hz."""
    spec = FaultSpec.from_tag(tag)
    if spec.kind is FaultKind.HEALTHY:
        return "Healthy"
    if spec.kind is FaultKind.BROKEN_BARS:
        return "BrokenBars"
    return f"LoadOsc_{spec.osc_freq}Hz"


@dataclass(frozen=True, eq=False)
class SignalRecord:
    """One labelled measurement channel."""

    condition: str
    load_pct: int
    channel: Channel
    fs: float
    samples: np.ndarray
    seed: int = 0

    def __post_init__(self):
        if self.condition not in CONDITION_TAGS:
            raise UnknownCondition(f"unknown condition tag {self.condition!r}")
        object.__setattr__(self, "channel", Channel(self.channel))
        s = np.array(self.samples, dtype=float, copy=True)
        if s.ndim != 1 or not np.all(np.isfinite(s)):
            raise ValueError("samples must be a finite 1-D sequence")
        if self.fs <= 0:
            raise ValueError(f"fs must be positive, got {self.fs}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "fs", float(self.fs))
        object.__setattr__(self, "load_pct", int(self.load_pct))
        object.__setattr__(self, "seed", int(self.seed))

    def __eq__(self, other):
        if not isinstance(other, SignalRecord):
            return NotImplemented
        return (
            self.condition == other.condition
            and self.load_pct == other.load_pct
            and self.channel == other.channel
            and self.fs == other.fs
            and self.seed == other.seed
            and np.array_equal(self.samples, other.samples)
        )

    __hash__ = None

    @property
    def n_samples(self) -> int:
        return self.samples.size

    @property
    def fault(self) -> FaultSpec:
        return FaultSpec.from_tag(self.condition, self.load_pct)
