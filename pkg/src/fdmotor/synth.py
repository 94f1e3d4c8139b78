"""Synthetic induction-motor measurements.

Stands in for bench recordings: two phase currents, two line voltages and the
instantaneous active power (two-wattmeter form) for a healthy motor, rotors
with 1-3 broken bars and low-frequency load oscillations.

Current model for phase offset phi (A depends on load)::

    healthy      A sin(2 pi f t + phi)
    broken bars  + sum_k a_k [sin(2 pi f (1 - 2ks) t + phi) + sin(2 pi f (1 + 2ks) t + phi)]
    load osc.    A (1 + m sin(2 pi f_osc t)) sin(2 pi f t + phi)

plus white noise. Amplitudes are generator knobs, not motor physics.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .errors import LengthMismatch
from .records import (
    CONDITION_TAGS,
    LOAD_LEVELS,
    Channel,
    FaultKind,
    FaultSpec,
    SignalRecord,
)

_CHANNEL_CODE = {c: i for i, c in enumerate(Channel)}


@dataclass(frozen=True)
class MotorSpec:
    rated_freq: float = 50.0
    rated_speed: float = 1470.0
    pole_pairs: int = 2
    fs: float = 8000.0
    n_samples: int = 128000
    current_amp: float = 1.0
    voltage_amp: float = 1.0
    power_factor: float = 0.85
    # noise std relative to the channel amplitude, in dB; None disables noise
    noise_db: Optional[float] = -60.0
    sideband_per_bar: float = 0.02
    mod_depth: Tuple[Tuple[str, float], ...] = (("A", 0.02), ("B", 0.03))
    # measurements start at a random instant in [0, start_jitter) seconds
    start_jitter: float = 0.0

    def __post_init__(self):
        s = self.slip
        if not 0 < s < 0.1:
            raise ValueError(f"slip {s} outside (0, 0.1)")

    @property
    def sync_speed(self) -> float:
        return 60.0 * self.rated_freq / self.pole_pairs

    @property
    def slip(self) -> float:
        return (self.sync_speed - self.rated_speed) / self.sync_speed

    def sideband_freqs(self, k: int = 1) -> Tuple[float, float]:
        f, s = self.rated_freq, self.slip
        return f * (1 - 2 * k * s), f * (1 + 2 * k * s)

    def amplitude(self, load_pct: float) -> float:
        return self.current_amp * (0.4 + 0.006 * load_pct)

    def depth(self, level: str) -> float:
        return dict(self.mod_depth)[level]

    def time(self) -> np.ndarray:
        return np.arange(self.n_samples) / self.fs


@dataclass(frozen=True)
class _Measurement:
    phase: float
    start: float


def _measurement(motor: MotorSpec, seed: int) -> _Measurement:
    rng = np.random.default_rng([int(seed), 0xA11])
    phase = rng.uniform(0.0, 2 * np.pi)
    start = rng.uniform(0.0, motor.start_jitter) if motor.start_jitter > 0 else 0.0
    return _Measurement(phase, start)


def _noise(motor: MotorSpec, seed: int, channel: Channel, amplitude: float) -> np.ndarray:
    if motor.noise_db is None:
        return np.zeros(motor.n_samples)
    rng = np.random.default_rng([int(seed), 0xB0B, _CHANNEL_CODE[channel]])
    return amplitude * 10 ** (motor.noise_db / 20) * rng.standard_normal(motor.n_samples)


def current_waveform(motor: MotorSpec, fault: FaultSpec, phase_offset: float,
                     t: np.ndarray) -> np.ndarray:
    """Noise-free stator current for one phase."""
    A = motor.amplitude(fault.load_pct)
    w = 2 * np.pi * motor.rated_freq
    i = A * np.sin(w * t + phase_offset)
    if fault.kind is FaultKind.BROKEN_BARS:
        a1 = motor.sideband_per_bar * fault.n_bars * A
        for k, a in ((1, a1), (2, a1 / 3)):
            lo, hi = motor.sideband_freqs(k)
            i = i + a * (np.sin(2 * np.pi * lo * t + phase_offset)
                         + np.sin(2 * np.pi * hi * t + phase_offset))
    elif fault.kind is FaultKind.LOAD_OSCILLATION:
        m = motor.depth(fault.level)
        i = i * (1 + m * np.sin(2 * np.pi * fault.osc_freq * t))
    return i


def gen_current(motor: MotorSpec, fault: FaultSpec, phase: int = 0, seed: int = 0
                ) -> SignalRecord:
    """Stator current of phase 0 (a) or 1 (b); both lag their voltage by acos(pf)."""
    if phase not in (0, 1):
        raise ValueError(f"phase must be 0 or 1, got {phase}")
    meas = _measurement(motor, seed)
    t = motor.time() + meas.start
    offset = meas.phase - math.acos(motor.power_factor) - phase * 2 * np.pi / 3
    channel = Channel.CURRENT_1 if phase == 0 else Channel.CURRENT_2
    samples = current_waveform(motor, fault, offset, t)
    samples = samples + _noise(motor, seed, channel, motor.amplitude(fault.load_pct))
    return SignalRecord(fault.tag, fault.load_pct, channel, motor.fs, samples, seed)


def gen_line_voltage(motor: MotorSpec, phase_pair: int = 0, seed: int = 0,
                     fault: Optional[FaultSpec] = None) -> SignalRecord:
    """Line voltage v_ac (pair 0) or v_bc (pair 1) of a balanced supply."""
    if phase_pair not in (0, 1):
        raise ValueError(f"phase_pair must be 0 or 1, got {phase_pair}")
    fault = fault or FaultSpec()
    meas = _measurement(motor, seed)
    t = motor.time() + meas.start
    # v_a - v_c leads v_a by -30 deg, v_b - v_c by -90 deg
    offset = meas.phase - (np.pi / 6 if phase_pair == 0 else np.pi / 2)
    w = 2 * np.pi * motor.rated_freq
    channel = Channel.VOLTAGE_1 if phase_pair == 0 else Channel.VOLTAGE_2
    samples = motor.voltage_amp * np.sin(w * t + offset)
    samples = samples + _noise(motor, seed, channel, motor.voltage_amp)
    return SignalRecord(fault.tag, fault.load_pct, channel, motor.fs, samples, seed)


def compute_iap(i1: SignalRecord, i2: SignalRecord, v1: SignalRecord, v2: SignalRecord
                ) -> SignalRecord:
    """Instantaneous active power p = v1 i1 + v2 i2."""
    recs = (i1, i2, v1, v2)
    if len({r.fs for r in recs}) != 1 or len({r.n_samples for r in recs}) != 1:
        raise LengthMismatch("IAP inputs must share sampling rate and length")
    p = v1.samples * i1.samples + v2.samples * i2.samples
    return SignalRecord(i1.condition, i1.load_pct, Channel.IAP, i1.fs, p, i1.seed)


def gen_measurement(motor: MotorSpec, fault: FaultSpec, seed: int) -> dict:
    """All four measured channels plus IAP for one run."""
    i1 = gen_current(motor, fault, 0, seed)
    i2 = gen_current(motor, fault, 1, seed)
    v1 = gen_line_voltage(motor, 0, seed, fault)
    v2 = gen_line_voltage(motor, 1, seed, fault)
    return {Channel.CURRENT_1: i1, Channel.CURRENT_2: i2, Channel.VOLTAGE_1: v1,
            Channel.VOLTAGE_2: v2, Channel.IAP: compute_iap(i1, i2, v1, v2)}


def record_seed(seed: int, tag: str, load_pct: int, repetition: int) -> int:
    """Per-measurement seed, independent of generation order."""
    key = zlib.crc32(tag.encode())
    ss = np.random.SeedSequence([int(seed), key, int(load_pct), int(repetition)])
    return int(ss.generate_state(1)[0])


def default_manifest() -> List[Tuple[FaultSpec, int]]:
    """Measurement plan of the bench corpus: 10 healthy and 2 faulty runs per load."""
    manifest = []
    for tag in CONDITION_TAGS:
        reps = 10 if tag == "HM" else 2
        for load in LOAD_LEVELS:
            manifest.append((FaultSpec.from_tag(tag, load), reps))
    return manifest


def gen_corpus(motor: MotorSpec = MotorSpec(),
               manifest: Optional[Iterable[Tuple[FaultSpec, int]]] = None,
               seed: int = 0) -> List[SignalRecord]:
    """Phase-1 current for every run, followed by IAP for every faulty run."""
    manifest = default_manifest() if manifest is None else list(manifest)
    currents, powers = [], []
    for fault, reps in manifest:
        for rep in range(reps):
            s = record_seed(seed, fault.tag, fault.load_pct, rep)
            if fault.kind is FaultKind.HEALTHY:
                currents.append(gen_current(motor, fault, 0, s))
            else:
                chans = gen_measurement(motor, fault, s)
                currents.append(chans[Channel.CURRENT_1])
                powers.append(chans[Channel.IAP])
    return currents + powers
