"""Detection and diagnosis pipeline on top of FPCA / FDM embeddings.

Stage 1 (detection) embeds the derivative of one stator current per run and
splits the embedding with 2-means; the cluster holding a clean healthy
template is called Healthy. Stage 2 (diagnosis) embeds the low-frequency
band of the active-power signature of the faulty runs, splits it with
3-means and names each cluster from its mean spectrum.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionError, EmptyResult, NoRecords
from .fda import FunctionalDataset, SampleGrid, trapezoid_weights
from .fdm import FdmParams, Kernel, fit_fdm
from .fpca import fit_fpca, transform
from .preprocess import PreprocessConfig, PreprocessedSignal, preprocess_signal
from .records import Channel, FaultSpec, SignalRecord, fault_group
from .synth import MotorSpec, gen_current

log = logging.getLogger(__name__)

DATA_KINDS = ("signal", "derivative", "signature")
METHODS = ("FPCA", "FDM")

# (channel, data kind) -> (kernel, sigma, alpha), tuned on the bench recordings
FDM_DEFAULTS: Dict[Tuple[str, str], Tuple[Kernel, float, float]] = {
    ("current", "signal"): (Kernel.GAUSSIAN, 0.035, 1.0),
    ("current", "derivative"): (Kernel.GAUSSIAN, 10.0, 0.0),
    ("current", "signature"): (Kernel.LAPLACIAN, 100.0, 1.0),
    ("iap", "signal"): (Kernel.GAUSSIAN, 0.1, 0.5),
    ("iap", "derivative"): (Kernel.GAUSSIAN, 5.0, 0.0),
    ("iap", "signature"): (Kernel.LAPLACIAN, 38.0, 0.25),
}

# a cluster split scoring below this is treated as a single group
DEGENERATE_SILHOUETTE = 0.1
# line at twice the dominant frequency, relative to the dominant line, above
# which a cluster is read as a broken-bar family (2ksf lines, k = 1, 2)
HARMONIC_RATIO = 0.15
OSC_FREQS = (1.0, 2.0)
DIAGNOSIS_BAND = (0.0, 10.0)
DETECTION_CONFIG = PreprocessConfig(truncate_len=750, derivative=True)


def fdm_defaults(channel: str, data_kind: str, steps: int = 1, n_components: int = 2
                 ) -> FdmParams:
    kernel, sigma, alpha = FDM_DEFAULTS[(channel_family(channel), data_kind)]
    return FdmParams(kernel=kernel, sigma=sigma, alpha=alpha, steps=steps,
                     n_components=n_components)


def channel_family(channel) -> str:
    c = channel.value if isinstance(channel, Channel) else str(channel)
    if c in ("current", "iap"):
        return c
    return "iap" if Channel(c) is Channel.IAP else "current"


@dataclass(eq=False)
class EmbeddingResult:
    method: str
    params: dict
    labels: List[str]
    loads: List[int]
    coords: np.ndarray
    data_kind: str
    channel: str

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.ndim == 1:
            self.coords = self.coords.reshape(-1, 1) if self.coords.size else self.coords.reshape(0, 0)
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.data_kind not in DATA_KINDS:
            raise ValueError(f"data_kind must be one of {DATA_KINDS}, got {self.data_kind!r}")
        if len(self.labels) != self.coords.shape[0] or len(self.loads) != len(self.labels):
            raise DimensionError("labels, loads and coords disagree in length")
        if not np.all(np.isfinite(self.coords)):
            raise ValueError("embedding coordinates must be finite")
        self.labels = list(self.labels)
        self.loads = [int(x) for x in self.loads]

    def __len__(self) -> int:
        return len(self.labels)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "params": self.params,
            "data_kind": self.data_kind,
            "channel": self.channel,
            "labels": self.labels,
            "loads": self.loads,
            "coords": self.coords.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EmbeddingResult":
        coords = np.array(d["coords"], dtype=float)
        if coords.size == 0:
            coords = coords.reshape(0, 0)
        return cls(d["method"], d["params"], d["labels"], d["loads"], coords,
                   d["data_kind"], d["channel"])


@dataclass
class PipelineVerdict:
    """Per-signal verdicts.

    ``stage2`` is aligned with ``stage1``; entries are None for signals judged
    Healthy.
    """

    stage1: Optional[List[str]] = None
    stage2: Optional[List[Optional[str]]] = None
    separation_scores: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.stage1 is not None and self.stage2 is not None:
            if len(self.stage1) != len(self.stage2):
                raise DimensionError("stage1 and stage2 disagree in length")
            for s1, s2 in zip(self.stage1, self.stage2):
                if (s2 is not None) != (s1 == "Faulty"):
                    raise ValueError("stage2 verdicts exist only for faulty signals")

    def to_dict(self) -> dict:
        return {"stage1": self.stage1, "stage2": self.stage2,
                "separation_scores": self.separation_scores}


# ---------------------------------------------------------------- clustering

def kmeans(coords: np.ndarray, k: int, max_iter: int = 300) -> Tuple[np.ndarray, np.ndarray]:
    """Lloyd's k-means with deterministic farthest-point initialization.

    The first center is the point farthest from the overall centroid (lowest
    index on ties); each further center is the point farthest from the
    centers chosen so far.
    """
    X = np.asarray(coords, dtype=float)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise DimensionError(f"k must lie in [1, {n}], got {k}")
    first = int(np.argmax(np.sum((X - X.mean(axis=0)) ** 2, axis=1)))
    idx = [first]
    mind = np.sum((X - X[first]) ** 2, axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(mind))
        idx.append(nxt)
        mind = np.minimum(mind, np.sum((X - X[nxt]) ** 2, axis=1))
    centers = X[idx].copy()
    labels = np.full(n, -1)
    for _ in range(max_iter):
        new = np.argmin(cdist(X, centers, "sqeuclidean"), axis=1)
        if np.array_equal(new, labels):
            break
        labels = new
        for c in range(k):
            members = X[labels == c]
            if members.size:
                centers[c] = members.mean(axis=0)
    return labels, centers


def silhouette(coords: np.ndarray, labels: Sequence) -> float:
    """Mean silhouette with Euclidean distances.

    Points in singleton clusters score 0, as does any point whose intra- and
    nearest inter-cluster mean distances are both 0 (e.g. all coordinates
    identical).
    """
    X = np.asarray(coords, dtype=float)
    lab = np.asarray(labels)
    n = X.shape[0]
    uniq = list(dict.fromkeys(lab.tolist()))
    if len(uniq) < 2:
        raise ValueError("silhouette needs at least two distinct labels")
    if n < 3 or lab.size != n:
        raise DimensionError("silhouette needs N >= 3 points with one label each")
    D = cdist(X, X)
    masks = [lab == u for u in uniq]
    s = np.zeros(n)
    for i in range(n):
        own = next(m for m in masks if m[i])
        n_own = own.sum()
        if n_own == 1:
            continue
        a = D[i, own].sum() / (n_own - 1)
        b = min(D[i, m].mean() for m in masks if not m[i])
        denom = max(a, b)
        s[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(s.mean())


def cluster_accuracy(pred: Sequence, truth: Sequence) -> float:
    """Agreement of two labelings under the best one-to-one relabelling."""
    from itertools import permutations

    pred = list(pred)
    truth = list(truth)
    pu = sorted(set(map(str, pred)))
    tu = sorted(set(map(str, truth)))
    best = 0
    for perm in permutations(tu, min(len(pu), len(tu))):
        mapping = dict(zip(pu, perm))
        hits = sum(mapping.get(str(p)) == str(t) for p, t in zip(pred, truth))
        best = max(best, hits)
    return best / len(truth)


# ------------------------------------------------------------- embedding

def _representation(pp: PreprocessedSignal, data_kind: str, band) -> Tuple[np.ndarray, np.ndarray]:
    if data_kind == "signal":
        return pp.grid.points, pp.signal
    if data_kind == "derivative":
        return pp.grid.points, pp.derivative
    sig = pp.signature if band is None else pp.signature.band(*band)
    return sig.freqs, sig.magnitudes


def signature_config(records: Sequence[SignalRecord], center: bool) -> PreprocessConfig:
    """Longest common whole-second window, so that 1 Hz falls on a bin."""
    # generous bound on the alignment shift: two fundamental periods
    shortest = min(r.n_samples for r in records)
    fs = records[0].fs
    usable = shortest - int(np.ceil(2 * fs / 50.0))
    n = int(usable // fs * fs) if usable >= fs else usable
    return PreprocessConfig(truncate_len=max(n, 2), signature=True, center_for_alignment=center)


def build_dataset(records: Sequence[SignalRecord], data_kind: str,
                  cfg: Optional[PreprocessConfig] = None,
                  band: Optional[Tuple[float, float]] = None) -> FunctionalDataset:
    """Preprocess records into one functional dataset of the requested kind."""
    if not records:
        raise NoRecords("no records to preprocess")
    if data_kind not in DATA_KINDS:
        raise ValueError(f"data_kind must be one of {DATA_KINDS}")
    if cfg is None:
        cfg = PreprocessConfig(derivative=data_kind == "derivative",
                               signature=data_kind == "signature",
                               center_for_alignment=records[0].channel is Channel.IAP)
    rows, grid = [], None
    for r in records:
        pts, vals = _representation(preprocess_signal(r, cfg), data_kind, band)
        if grid is None:
            grid = SampleGrid(pts)
        rows.append(vals)
    return FunctionalDataset(grid, np.vstack(rows), labels=[r.condition for r in records],
                             meta={"cfg": cfg, "band": band})


def _fpca_params(params: Optional[dict]) -> dict:
    p = {"n_components": 2, "centered": False}
    p.update(params or {})
    return p


def _fdm_params(params, channel: str, data_kind: str) -> FdmParams:
    if isinstance(params, FdmParams):
        return params
    p = fdm_defaults(channel, data_kind).to_dict()
    p.update(params or {})
    return FdmParams(**p)


def embed_dataset(data: FunctionalDataset, method: str, params, channel: str,
                  data_kind: str, extra: Optional[np.ndarray] = None
                  ) -> Tuple[np.ndarray, dict, Optional[np.ndarray]]:
    """Embed ``data``; ``extra`` rows (same grid) are placed in the same space.

    Returns (coords, parameter record, extra coords).
    """
    method = method.upper()
    q = trapezoid_weights(data.grid)
    if method == "FPCA":
        p = _fpca_params(params)
        model = fit_fpca(data, q, p["n_components"], p["centered"])
        extra_coords = None
        if extra is not None:
            extra_coords = transform(model, FunctionalDataset(data.grid, extra))
        return model.scores, p, extra_coords
    if method == "FDM":
        p = _fdm_params(params, channel, data_kind)
        values = data.values if extra is None else np.vstack([data.values, extra])
        model = fit_fdm(FunctionalDataset(data.grid, values), q, p)
        n = data.n_functions
        coords = model.embedding[:n]
        extra_coords = model.embedding[n:] if extra is not None else None
        return coords, p.to_dict(), extra_coords
    raise ValueError(f"method must be one of {METHODS}, got {method!r}")


def embed_records(records: Sequence[SignalRecord], method: str = "FPCA",
                  data_kind: str = "signal", params=None,
                  cfg: Optional[PreprocessConfig] = None,
                  band: Optional[Tuple[float, float]] = None) -> EmbeddingResult:
    data = build_dataset(records, data_kind, cfg, band)
    channel = channel_family(records[0].channel)
    coords, p, _ = embed_dataset(data, method, params, channel, data_kind)
    return EmbeddingResult(method.upper(), p, [r.condition for r in records],
                           [r.load_pct for r in records], coords, data_kind, channel)


# --------------------------------------------------------------- stages

def healthy_template(record: SignalRecord, motor: Optional[MotorSpec] = None) -> SignalRecord:
    """Noise-free healthy current matching the record's sampling."""
    motor = motor or MotorSpec()
    motor = MotorSpec(rated_freq=motor.rated_freq, rated_speed=motor.rated_speed,
                      pole_pairs=motor.pole_pairs, fs=record.fs, n_samples=record.n_samples,
                      noise_db=None)
    return gen_current(motor, FaultSpec(), 0, seed=0)


def run_detection(corpus: Sequence[SignalRecord], method: str = "FPCA", params=None,
                  cfg: PreprocessConfig = DETECTION_CONFIG,
                  motor: Optional[MotorSpec] = None) -> Tuple[EmbeddingResult, PipelineVerdict]:
    """Stage 1: healthy vs faulty from current derivatives."""
    currents = [r for r in corpus if r.channel.is_current]
    if not currents:
        raise NoRecords("detection needs current records")
    data = build_dataset(currents, "derivative", cfg)
    tmpl = build_dataset([healthy_template(currents[0], motor)], "derivative", cfg)
    coords, p, tcoords = embed_dataset(data, method, params, "current", "derivative",
                                       extra=tmpl.values)
    result = EmbeddingResult(method.upper(), p, [r.condition for r in currents],
                             [r.load_pct for r in currents], coords, "derivative", "current")

    scores: Dict[str, float] = {}
    verdict = ["Healthy"] * len(currents)
    if len(currents) >= 3:
        labels, centers = kmeans(coords, 2)
        split = silhouette(coords, labels) if len(set(labels.tolist())) == 2 else 0.0
        scores["cluster"] = split
        if split >= DEGENERATE_SILHOUETTE:
            healthy = int(np.argmin(np.sum((centers - tcoords[0]) ** 2, axis=1)))
            verdict = ["Healthy" if c == healthy else "Faulty" for c in labels]
        truth = ["Healthy" if r.condition == "HM" else "Faulty" for r in currents]
        if len(set(truth)) == 2:
            scores["true"] = silhouette(coords, truth)
    log.info("detection: %d signals, scores %s", len(currents), scores)
    return result, PipelineVerdict(stage1=verdict, separation_scores=scores)


def name_cluster(freqs: np.ndarray, mean_signature: np.ndarray,
                 osc_freqs: Sequence[float] = OSC_FREQS) -> str:
    """Diagnosis label for a cluster from its mean low-band signature.

    A broken-bar cluster shows a family of lines (at 2ksf); a sinusoidal load
    oscillation shows a single line at its own frequency.
    """
    k = int(np.argmax(mean_signature))
    f_peak = freqs[k]
    h = int(np.argmin(np.abs(freqs - 2 * f_peak)))
    if h != k and mean_signature[h] >= HARMONIC_RATIO * mean_signature[k]:
        return "BrokenBars"
    f_osc = min(osc_freqs, key=lambda f: abs(f - f_peak))
    return f"LoadOsc_{f_osc:g}Hz"


def run_diagnosis(corpus_faulty: Sequence[SignalRecord], method: str = "FPCA", params=None,
                  cfg: Optional[PreprocessConfig] = None,
                  band: Tuple[float, float] = DIAGNOSIS_BAND) -> Tuple[EmbeddingResult, PipelineVerdict]:
    """Stage 2: broken bars vs 1 Hz vs 2 Hz load oscillation from IAP signatures."""
    iap = [r for r in corpus_faulty if r.channel is Channel.IAP]
    if not iap:
        raise NoRecords("diagnosis needs IAP records")
    cfg = cfg or signature_config(iap, center=True)
    data = build_dataset(iap, "signature", cfg, band)
    coords, p, _ = embed_dataset(data, method, params, "iap", "signature")
    result = EmbeddingResult(method.upper(), p, [r.condition for r in iap],
                             [r.load_pct for r in iap], coords, "signature", "iap")

    scores: Dict[str, float] = {}
    labels = np.zeros(len(iap), dtype=int)
    if len(iap) >= 3:
        km, _ = kmeans(coords, 3)
        split = silhouette(coords, km) if len(set(km.tolist())) >= 2 else 0.0
        scores["cluster"] = split
        if split >= DEGENERATE_SILHOUETTE:
            labels = km
        truth = [fault_group(r.condition) for r in iap]
        if len(set(truth)) >= 2:
            scores["true"] = silhouette(coords, truth)
    freqs = data.grid.points
    names = {c: name_cluster(freqs, data.values[labels == c].mean(axis=0))
             for c in np.unique(labels)}
    verdict = [names[c] for c in labels]
    log.info("diagnosis: %d signals, clusters %s, scores %s", len(iap), names, scores)
    return result, PipelineVerdict(stage1=["Faulty"] * len(iap), stage2=verdict,
                                   separation_scores=scores)


def _run_key(r: SignalRecord) -> Tuple[str, int, int]:
    return (r.condition, r.load_pct, r.seed)


def run_pipeline(corpus: Sequence[SignalRecord], method: str = "FPCA"
                 ) -> Tuple[List[SignalRecord], PipelineVerdict]:
    """Detection on currents, then diagnosis on the IAP of flagged runs.

    Runs flagged faulty without an IAP record get the stage-2 label
    ``Undiagnosed``.
    """
    currents = [r for r in corpus if r.channel is Channel.CURRENT_1] or \
        [r for r in corpus if r.channel.is_current]
    _, v1 = run_detection(currents, method)
    iap = {_run_key(r): r for r in corpus if r.channel is Channel.IAP}
    flagged = [r for r, v in zip(currents, v1.stage1) if v == "Faulty"]
    matched = [iap[_run_key(r)] for r in flagged if _run_key(r) in iap]
    stage2_by_key: Dict[Tuple[str, int, int], str] = {}
    scores = {f"stage1_{k}": v for k, v in v1.separation_scores.items()}
    if matched:
        _, v2 = run_diagnosis(matched, method)
        stage2_by_key = {_run_key(r): s for r, s in zip(matched, v2.stage2)}
        scores.update({f"stage2_{k}": v for k, v in v2.separation_scores.items()})
    stage2 = [
        (stage2_by_key.get(_run_key(r), "Undiagnosed") if v == "Faulty" else None)
        for r, v in zip(currents, v1.stage1)
    ]
    return currents, PipelineVerdict(stage1=v1.stage1, stage2=stage2, separation_scores=scores)


# ------------------------------------------------------------ export / plot

def export_embedding(result: EmbeddingResult, path: Union[str, Path], fmt: str = "json") -> Path:
    """Write ``result`` as JSON or as a comma-separated table with a # header."""
    if len(result) == 0:
        raise EmptyResult("refusing to export an empty embedding")
    path = Path(path)
    if fmt == "json":
        path.write_text(json.dumps(result.to_dict(), indent=1) + "\n")
    elif fmt == "table":
        lines = [
            f"# method={result.method}",
            f"# data_kind={result.data_kind}",
            f"# channel={result.channel}",
            f"# params={json.dumps(result.params, sort_keys=True)}",
            "label,load," + ",".join(f"c{j + 1}" for j in range(result.coords.shape[1])),
        ]
        for lab, load, row in zip(result.labels, result.loads, result.coords):
            lines.append(",".join([lab, str(load)] + [repr(float(v)) for v in row]))
        path.write_text("\n".join(lines) + "\n")
    else:
        raise ValueError(f"format must be 'json' or 'table', got {fmt!r}")
    return path


def load_embedding(path: Union[str, Path]) -> EmbeddingResult:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return EmbeddingResult.from_dict(json.loads(text))
    header, rows = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            header[key] = val
        elif line and not line.startswith("label,"):
            rows.append(line.split(","))
    return EmbeddingResult(
        header["method"], json.loads(header["params"]), [r[0] for r in rows],
        [int(r[1]) for r in rows], np.array([[float(v) for v in r[2:]] for r in rows]),
        header["data_kind"], header["channel"],
    )


_MARKERS = {0: "o", 20: "s", 40: "^", 60: "D", 80: "v"}


def plot_embedding(result: EmbeddingResult, path: Union[str, Path]) -> dict:
    """Scatter the first two coordinates to a vector file (format from suffix).

    Colour encodes the condition tag, marker shape the load. Returns a summary
    with the number of plotted markers.
    """
    if len(result) == 0:
        raise EmptyResult("nothing to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xy = result.coords if result.coords.shape[1] >= 2 else np.column_stack(
        [result.coords[:, 0], np.zeros(len(result))])
    tags = list(dict.fromkeys(result.labels))
    cmap = plt.get_cmap("tab10")
    fig, ax = plt.subplots(figsize=(6, 4.5))
    n_markers = 0
    for ti, tag in enumerate(tags):
        for load in sorted(set(result.loads)):
            sel = [i for i, (t, l) in enumerate(zip(result.labels, result.loads))
                   if t == tag and l == load]
            if not sel:
                continue
            coll = ax.scatter(xy[sel, 0], xy[sel, 1], color=cmap(ti % 10),
                              marker=_MARKERS.get(load, "o"), s=22,
                              label=tag if load == min(l for t, l in zip(result.labels, result.loads) if t == tag) else None)
            n_markers += len(coll.get_offsets())
    ax.set_title(f"{result.method} embedding, {result.channel} {result.data_kind}")
    ax.set_xlabel("component 1")
    ax.set_ylabel("component 2")
    ax.legend(fontsize=7, loc="best")
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return {"path": str(path), "n_markers": n_markers, "n_points": len(result)}
