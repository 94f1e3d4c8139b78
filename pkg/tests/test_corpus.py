import json

import numpy as np
import pytest

from fdmotor.corpus import load_corpus, read_record, save_corpus, write_record
from fdmotor.errors import LengthMismatch, MalformedHeader, UnknownCondition
from fdmotor.records import Channel, FaultSpec, SignalRecord
from fdmotor.synth import MotorSpec, gen_corpus, gen_current


@pytest.fixture
def small():
    motor = MotorSpec(n_samples=300)
    man = [(FaultSpec.from_tag("HM", 0), 1), (FaultSpec.from_tag("SS_1_B", 80), 1)]
    return gen_corpus(motor, man, seed=5)


def test_round_trip(small, tmp_path):
    assert len(small) == 3
    save_corpus(small, tmp_path / "c")
    back = load_corpus(tmp_path / "c")
    assert back == small
    for a, b in zip(small, back):
        assert np.array_equal(a.samples, b.samples)


def test_round_trip_awkward_values(tmp_path):
    rec = gen_current(MotorSpec(n_samples=50), FaultSpec(), seed=1)
    x = rec.samples.copy()
    x[:4] = [np.pi * 1e-300, -1 / 3, 2.0 ** -1074, 1e308]
    rec = SignalRecord("HM", 0, Channel.CURRENT_1, 8000.0, x, 3)
    write_record(rec, tmp_path / "r.txt")
    assert read_record(tmp_path / "r.txt") == rec


def test_manifest(small, tmp_path):
    root = save_corpus(small, tmp_path)
    entries = json.loads((root / "manifest.json").read_text())["records"]
    assert [e["condition"] for e in entries] == [r.condition for r in small]
    assert entries[2]["channel"] == "iap"


def test_without_manifest(small, tmp_path):
    save_corpus(small, tmp_path)
    (tmp_path / "manifest.json").unlink()
    assert load_corpus(tmp_path) == small


def test_missing_fs(small, tmp_path):
    p = write_record(small[0], tmp_path / "r.txt")
    lines = [ln for ln in p.read_text().splitlines() if not ln.startswith("# fs=")]
    p.write_text("\n".join(lines) + "\n")
    with pytest.raises(MalformedHeader):
        read_record(p)


def test_bad_header_value(small, tmp_path):
    p = write_record(small[0], tmp_path / "r.txt")
    p.write_text(p.read_text().replace("# load=0", "# load=zero"))
    with pytest.raises(MalformedHeader):
        read_record(p)


def test_declared_length(small, tmp_path):
    p = write_record(small[0], tmp_path / "r.txt")
    p.write_text("\n".join(p.read_text().splitlines()[:-1]) + "\n")
    with pytest.raises(LengthMismatch):
        read_record(p)


def test_unknown_condition(small, tmp_path):
    p = write_record(small[0], tmp_path / "r.txt")
    p.write_text(p.read_text().replace("condition=HM", "condition=4BB"))
    with pytest.raises(UnknownCondition):
        read_record(p)


def test_empty_directory(tmp_path):
    assert load_corpus(tmp_path) == []
