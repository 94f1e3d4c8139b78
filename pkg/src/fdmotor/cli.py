"""Command-line interface.

    fdmotor synth --out-dir run/
    fdmotor detect run/corpus --out-dir run/
    fdmotor diagnose run/corpus --out-dir run/
    fdmotor embed run/corpus --method FDM --channel iap --kind signature
    fdmotor plot run/detect_FPCA.json

Failures exit with status 1 and print one JSON line ``{"error": ..., "type": ...}``
on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import corpus as corpus_io
from .errors import NoRecords
from .pipeline import (
    DATA_KINDS,
    build_dataset,
    embed_records,
    export_embedding,
    load_embedding,
    plot_embedding,
    run_detection,
    run_diagnosis,
    signature_config,
)
from .records import Channel
from .synth import MotorSpec, gen_corpus

log = logging.getLogger("fdmotor")


def _params(args) -> Optional[dict]:
    if not args.params_file:
        return None
    return json.loads(Path(args.params_file).read_text())


def _select(records, channel: str):
    if channel == "iap":
        out = [r for r in records if r.channel is Channel.IAP]
    else:
        out = [r for r in records if r.channel is Channel.CURRENT_1] or \
            [r for r in records if r.channel.is_current]
    if not out:
        raise NoRecords(f"corpus holds no {channel} records")
    return out


def _faulty(records):
    return [r for r in records if r.condition != "HM"]


def cmd_synth(args) -> dict:
    kw = {} if args.noise_db is None else {"noise_db": args.noise_db}
    if args.n_samples:
        kw["n_samples"] = args.n_samples
    records = gen_corpus(MotorSpec(**kw), seed=args.seed)
    root = corpus_io.save_corpus(records, args.out_dir / "corpus")
    return {"corpus": str(root), "n_records": len(records)}


def cmd_preprocess(args) -> dict:
    records = _select(corpus_io.load_corpus(args.corpus), args.channel)
    if args.faulty_only:
        records = _faulty(records)
    band = tuple(args.band) if args.band else None
    cfg = None
    if args.kind == "signature" and args.channel == "iap":
        cfg = signature_config(records, center=True)
    data = build_dataset(records, args.kind, cfg, band)
    out = args.out_dir / f"dataset_{args.channel}_{args.kind}.json"
    out.write_text(json.dumps({
        "kind": args.kind, "channel": args.channel,
        "grid": data.grid.points.tolist(), "labels": list(data.labels),
        "loads": [r.load_pct for r in records], "values": data.values.tolist(),
    }) + "\n")
    return {"dataset": str(out), "shape": list(data.values.shape)}


def cmd_embed(args) -> dict:
    records = _select(corpus_io.load_corpus(args.corpus), args.channel)
    if args.faulty_only:
        records = _faulty(records)
    band = tuple(args.band) if args.band else None
    cfg = None
    if args.kind == "signature" and args.channel == "iap":
        cfg = signature_config(records, center=True)
        band = band or (0.0, 10.0)
    result = embed_records(records, args.method, args.kind, _params(args), cfg, band)
    suffix = "json" if args.format == "json" else "csv"
    out = args.out_dir / f"embed_{args.method}_{args.channel}_{args.kind}.{suffix}"
    export_embedding(result, out, args.format)
    return {"embedding": str(out), "n_points": len(result)}


def _stage(args, runner, name) -> dict:
    records = corpus_io.load_corpus(args.corpus)
    result, verdict = runner(records, args.method, _params(args))
    suffix = "json" if args.format == "json" else "csv"
    emb = export_embedding(result, args.out_dir / f"{name}_{args.method}.{suffix}", args.format)
    vfile = args.out_dir / f"{name}_{args.method}_verdict.json"
    vfile.write_text(json.dumps(verdict.to_dict(), indent=1) + "\n")
    return {"embedding": str(emb), "verdict": str(vfile), "scores": verdict.separation_scores}


def cmd_detect(args) -> dict:
    return _stage(args, run_detection, "detect")


def cmd_diagnose(args) -> dict:
    return _stage(args, lambda recs, m, p: run_diagnosis(_faulty(recs), m, p), "diagnose")


def cmd_plot(args) -> dict:
    result = load_embedding(args.embedding)
    out = args.output or args.out_dir / (Path(args.embedding).stem + ".svg")
    return plot_embedding(result, out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out-dir", type=Path, default=Path("."))
    common.add_argument("--params-file", type=Path, default=None,
                        help="JSON file with method parameters")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="fdmotor", parents=[common],
                                     description="Functional FPCA/FDM motor fault analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic corpus")
    p.add_argument("--noise-db", type=float, default=None)
    p.add_argument("--n-samples", type=int, default=None)
    p.set_defaults(func=cmd_synth)

    for name, func, helptext in (("preprocess", cmd_preprocess, "write a preprocessed dataset"),
                                 ("embed", cmd_embed, "embed one data representation")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("corpus", type=Path)
        p.add_argument("--channel", choices=("current", "iap"), default="current")
        p.add_argument("--kind", choices=DATA_KINDS, default="signal")
        p.add_argument("--band", type=float, nargs=2, metavar=("LO", "HI"), default=None)
        p.add_argument("--faulty-only", action="store_true")
        if name == "embed":
            p.add_argument("--method", type=str.upper, choices=("FPCA", "FDM"), default="FPCA")
        p.set_defaults(func=func)

    for name, func in (("detect", cmd_detect), ("diagnose", cmd_diagnose)):
        p = sub.add_parser(name, parents=[common], help=f"run the {name} stage")
        p.add_argument("corpus", type=Path)
        p.add_argument("--method", type=str.upper, choices=("FPCA", "FDM"), default="FPCA")
        p.set_defaults(func=func)

    p = sub.add_parser("plot", parents=[common], help="scatter plot of an exported embedding")
    p.add_argument("embedding", type=Path)
    p.add_argument("-o", "--output", type=Path, default=None)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        summary = args.func(args)
    except Exception as exc:  # noqa: BLE001 - reported as one parsable line
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}), file=sys.stderr)
        return 1
    print(json.dumps(summary, default=lambda o: float(o) if isinstance(o, np.floating) else str(o)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
