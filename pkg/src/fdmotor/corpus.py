"""Plain-text corpus storage.

One file per record: ``#``-prefixed ``key=value`` header lines followed by
one sample per line, written with 17 significant digits so that a save/load
round trip is bit-exact. A ``manifest.json`` next to the files lists them in
order with their metadata.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, List, Union

import numpy as np

from .errors import LengthMismatch, MalformedHeader
from .records import Channel, SignalRecord

MANIFEST = "manifest.json"
_REQUIRED = ("fs", "condition", "load", "channel")


def record_filename(index: int, rec: SignalRecord) -> str:
    return f"{index:04d}_{rec.condition}_L{rec.load_pct:02d}_{rec.channel.value}.txt"


def write_record(rec: SignalRecord, path: Union[str, Path]) -> Path:
    path = Path(path)
    header = "\n".join([
        f"fs={rec.fs!r}",
        f"condition={rec.condition}",
        f"load={rec.load_pct}",
        f"channel={rec.channel.value}",
        f"seed={rec.seed}",
        f"n_samples={rec.n_samples}",
    ])
    np.savetxt(path, rec.samples, fmt="%.17g", header=header, comments="# ")
    return path


def read_record(path: Union[str, Path]) -> SignalRecord:
    path = Path(path)
    header = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, sep, val = line[1:].strip().partition("=")
            if not sep:
                raise MalformedHeader(f"{path}: bad header line {line.strip()!r}")
            header[key.strip()] = val.strip()
    missing = [k for k in _REQUIRED if k not in header]
    if missing:
        raise MalformedHeader(f"{path}: missing header field(s) {', '.join(missing)}")
    try:
        fs = float(header["fs"])
        load = int(header["load"])
        seed = int(header.get("seed", 0))
        channel = Channel(header["channel"])
    except ValueError as exc:
        raise MalformedHeader(f"{path}: {exc}") from None
    samples = np.loadtxt(path, comments="#", dtype=float, ndmin=1)
    if "n_samples" in header and int(header["n_samples"]) != samples.size:
        raise LengthMismatch(
            f"{path}: header declares {header['n_samples']} samples, found {samples.size}"
        )
    return SignalRecord(header["condition"], load, channel, fs, samples, seed)


def save_corpus(records: Iterable[SignalRecord], path: Union[str, Path]) -> Path:
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, rec in enumerate(records):
        name = record_filename(i, rec)
        write_record(rec, root / name)
        entries.append({"path": name, "condition": rec.condition, "load": rec.load_pct,
                        "channel": rec.channel.value, "seed": rec.seed, "fs": rec.fs,
                        "n_samples": rec.n_samples})
    (root / MANIFEST).write_text(json.dumps({"records": entries}, indent=1) + "\n")
    return root


def load_corpus(path: Union[str, Path]) -> List[SignalRecord]:
    """Load a corpus directory (manifest order if present, else sorted files)."""
    root = Path(path)
    if root.is_file():
        if root.name == MANIFEST:
            root = root.parent
        else:
            return [read_record(root)]
    manifest = root / MANIFEST
    if manifest.exists():
        entries = json.loads(manifest.read_text())["records"]
        return [read_record(root / e["path"]) for e in entries]
    return [read_record(p) for p in sorted(root.glob("*.txt"))]
