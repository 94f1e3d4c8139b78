import numpy as np
import pytest

from fdmotor.errors import LengthMismatch, NoZeroCrossing
from fdmotor.preprocess import align_first_zero_crossing, fft_signature
from fdmotor.records import Channel, FaultKind, FaultSpec, SignalRecord
from fdmotor.synth import (
    MotorSpec,
    compute_iap,
    default_manifest,
    gen_corpus,
    gen_current,
    gen_line_voltage,
    gen_measurement,
    record_seed,
)

CLEAN = MotorSpec(noise_db=None)


def dft_bins(x, fs, freqs):
    """Direct DFT magnitude (one-sided scaling) at selected frequencies."""
    n = x.size
    t = np.arange(n)
    out = []
    for f in freqs:
        k = round(f * n / fs)
        out.append(2 * abs(np.sum(x * np.exp(-2j * np.pi * k * t / n))) / n)
    return np.array(out)


def test_slip_and_sidebands():
    m = MotorSpec()
    assert m.sync_speed == 1500
    assert m.slip == pytest.approx(0.02, abs=1e-15)
    lo, hi = m.sideband_freqs(1)
    assert lo == pytest.approx(48.0, abs=1e-12) and hi == pytest.approx(52.0, abs=1e-12)


def test_invalid_slip():
    with pytest.raises(ValueError):
        MotorSpec(rated_speed=1500)


def test_healthy_clean_spectrum():
    rec = gen_current(CLEAN, FaultSpec(load_pct=40), seed=3)
    sig = fft_signature(rec.samples, rec.fs)
    k50 = int(round(50 * rec.n_samples / rec.fs))
    total = np.sum(sig.magnitudes ** 2)
    near = np.sum(sig.magnitudes[k50 - 1:k50 + 2] ** 2)
    assert (total - near) / total < 1e-10


def test_current_deterministic():
    f = FaultSpec.from_tag("2BB", 60)
    a = gen_current(MotorSpec(), f, 0, seed=99)
    b = gen_current(MotorSpec(), f, 0, seed=99)
    assert a == b
    assert not np.array_equal(a.samples, gen_current(MotorSpec(), f, 0, seed=100).samples)


def test_current_amplitude_follows_load():
    peaks = [np.max(gen_current(CLEAN, FaultSpec(load_pct=L), seed=1).samples) for L in (0, 40, 80)]
    np.testing.assert_allclose(peaks, [0.4, 0.64, 0.88], rtol=1e-3)


def test_sideband_ordering():
    mags = []
    for tag in ("HM", "1BB", "2BB", "3BB"):
        rec = gen_current(CLEAN, FaultSpec.from_tag(tag, 40), seed=5)
        mags.append(dft_bins(rec.samples, rec.fs, [48.0, 52.0]))
    mags = np.array(mags)
    assert np.all(np.diff(mags, axis=0) > 0)


def test_broken_bar_sideband_amplitude():
    rec = gen_current(CLEAN, FaultSpec.from_tag("3BB", 0), seed=5)
    m48, m52, m46, m54 = dft_bins(rec.samples, rec.fs, [48.0, 52.0, 46.0, 54.0])
    a1 = 0.02 * 3 * 0.4
    assert m48 == pytest.approx(a1, rel=1e-9) and m52 == pytest.approx(a1, rel=1e-9)
    assert m46 == pytest.approx(a1 / 3, rel=1e-9) and m54 == pytest.approx(a1 / 3, rel=1e-9)


class TestVoltage:
    def test_peak_amplitude(self):
        v = gen_line_voltage(MotorSpec(noise_db=None, voltage_amp=2.3), 0, seed=4)
        assert np.max(np.abs(v.samples)) == pytest.approx(2.3, rel=1e-3)

    @pytest.mark.parametrize("pair", [0, 1])
    def test_fundamental_bin(self, pair):
        motor = MotorSpec(n_samples=800)
        v = gen_line_voltage(motor, pair, seed=12)
        x = v.samples
        n = x.size
        k = np.arange(n)
        dft = np.abs(np.exp(-2j * np.pi * np.outer(k, k) / n) @ x)[: n // 2 + 1]
        f_peak = np.argmax(dft) * v.fs / n
        assert abs(f_peak - 50.0) <= v.fs / n

    def test_deterministic(self):
        assert gen_line_voltage(MotorSpec(), 1, 8) == gen_line_voltage(MotorSpec(), 1, 8)

    def test_bad_pair(self):
        with pytest.raises(ValueError):
            gen_line_voltage(MotorSpec(), 2, 0)


class TestIap:
    def _rec(self, x, ch):
        return SignalRecord("HM", 0, ch, 100.0, x)

    def test_zero_currents(self):
        z = np.zeros(50)
        s = np.sin(np.arange(50))
        p = compute_iap(self._rec(z, Channel.CURRENT_1), self._rec(z, Channel.CURRENT_2),
                        self._rec(s, Channel.VOLTAGE_1), self._rec(s, Channel.VOLTAGE_2))
        assert np.all(p.samples == 0)
        assert p.channel is Channel.IAP

    def test_product_to_sum(self):
        t = np.arange(400) / 100.0
        s = np.sin(2 * np.pi * 5 * t)
        z = np.zeros_like(t)
        p = compute_iap(self._rec(s, Channel.CURRENT_1), self._rec(z, Channel.CURRENT_2),
                        self._rec(s, Channel.VOLTAGE_1), self._rec(z, Channel.VOLTAGE_2))
        np.testing.assert_allclose(p.samples, (1 - np.cos(4 * np.pi * 5 * t)) / 2, atol=1e-14)

    def test_length_mismatch(self):
        a = self._rec(np.zeros(5), Channel.CURRENT_1)
        b = self._rec(np.zeros(6), Channel.CURRENT_2)
        with pytest.raises(LengthMismatch):
            compute_iap(a, b, a, a)

    def test_balanced_healthy_power_is_constant(self):
        ch = gen_measurement(CLEAN, FaultSpec(load_pct=60), seed=2)
        p = ch[Channel.IAP].samples
        assert np.ptp(p) < 1e-10 * np.mean(p)
        assert np.mean(p) > 0

    @pytest.mark.parametrize("tag,f_osc", [("SS_1_A", 1.0), ("SS_2_B", 2.0)])
    def test_load_osc_line(self, tag, f_osc):
        ch = gen_measurement(MotorSpec(), FaultSpec.from_tag(tag, 40), seed=21)
        p = ch[Channel.IAP]
        n = p.n_samples
        freqs = np.arange(1, int(5 * n / p.fs) + 1) * p.fs / n
        mags = dft_bins(p.samples, p.fs, freqs)
        assert abs(freqs[np.argmax(mags)] - f_osc) <= p.fs / n / 2

    def test_broken_bar_line(self):
        m = MotorSpec()
        ch = gen_measurement(m, FaultSpec.from_tag("3BB", 40), seed=21)
        p = ch[Channel.IAP]
        two_sf = 2 * m.slip * m.rated_freq
        line, floor = dft_bins(p.samples, p.fs, [two_sf, 3.3])
        assert line > 100 * floor

    def test_osc_vs_broken_bar_separability(self):
        m = MotorSpec()
        bb = gen_measurement(m, FaultSpec.from_tag("1BB", 40), seed=4)[Channel.IAP]
        band = fft_signature(bb.samples, bb.fs).band(0.0, 5.0)
        med = np.median(band.magnitudes)
        for tag, f in (("SS_1_A", 1.0), ("SS_2_A", 2.0)):
            ss = gen_measurement(m, FaultSpec.from_tag(tag, 40), seed=4)[Channel.IAP]
            peak = dft_bins(ss.samples, ss.fs, [f])[0]
            assert peak >= 5 * med


class TestCorpus:
    def test_default_counts(self, corpus):
        cur = [r for r in corpus if r.channel.is_current]
        iap = [r for r in corpus if r.channel is Channel.IAP]
        assert len(cur) == 120 and len(iap) == 70
        assert sum(r.condition == "HM" for r in cur) == 50
        for tag in ("1BB", "2BB", "3BB", "SS_1_A", "SS_1_B", "SS_2_A", "SS_2_B"):
            assert sum(r.condition == tag for r in cur) == 10
            assert sum(r.condition == tag for r in iap) == 10
        assert all(r.n_samples == 128000 and r.fs == 8000 for r in corpus)

    def test_empty_manifest(self):
        assert gen_corpus(MotorSpec(), [], seed=1) == []

    def test_seeds_stable(self):
        a = record_seed(7, "2BB", 40, 1)
        assert a == record_seed(7, "2BB", 40, 1)
        assert len({record_seed(7, t, 40, 1) for t in ("2BB", "3BB", "HM")}) == 3

    def test_order_independent(self):
        motor = MotorSpec(n_samples=2000)
        man = [(FaultSpec.from_tag("1BB", 20), 2), (FaultSpec.from_tag("SS_2_A", 0), 1)]
        fwd = gen_corpus(motor, man, seed=9)
        rev = gen_corpus(motor, man[::-1], seed=9)
        key = lambda r: (r.channel.value, r.condition, r.seed)
        assert sorted(fwd, key=key) == sorted(rev, key=key)

    def test_manifest_shape(self):
        man = default_manifest()
        assert sum(reps for _, reps in man) == 120
        assert sum(reps for f, reps in man if f.kind is not FaultKind.HEALTHY) == 70

    def test_zero_crossings(self, corpus):
        for r in corpus:
            if r.channel is Channel.IAP:
                # strictly positive power: crossing exists around its mean
                with pytest.raises(NoZeroCrossing):
                    align_first_zero_crossing(r.samples)
                align_first_zero_crossing(r.samples, center=True)
            else:
                align_first_zero_crossing(r.samples)
