"""Batch command line for the analysis pipeline.

    posemap ingest --input data.json --format canonical-json --out corpus.json
    posemap train --corpus corpus.json --out model.json [--config cfg.json]
    posemap embed --model model.json --corpus corpus.json --out paths.json
    posemap metrics dtw --corpus corpus.json --a <id> --b <id>
    posemap metrics matrix --corpus corpus.json --referent wave --out m.json
    posemap consensus --referent wave --corpus corpus.json --out report.json
    posemap cluster --corpus corpus.json --scope referent:wave --k 2 --seeds auto --out model.json
    posemap map grid|scatter|density --model model.json --corpus corpus.json ...
    posemap serve --corpus corpus.json [--model model.json] --port 8000
    posemap export --corpus corpus.json --clusters m.json ... --consensus r.json ... --out analysis.json
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .barycenter import DbaConfig, variance_consensus
from .clustering import ClusterModel, init_clusters, run
from .dtw import distance_matrix, dtw
from .errors import PosemapError, ValidationError
from .exports import build_export
from .ingest import Corpus, build_corpus, parse_dataset
from .mapgrid import Viewport, default_viewport, density_grid, landmark_grid, scatter_projection
from .vae import VAEConfig, VAEModel, encode_sequence, train


def _write(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _scope_ids(corpus: Corpus, spec: str) -> list[str]:
    if spec.startswith("referent:"):
        return [s.id for s in corpus.sequences_for_referent(spec.split(":", 1)[1])]
    return [s for s in spec.split(",") if s]


def cmd_ingest(args) -> int:
    fragments = [parse_dataset(Path(p), args.format) for p in args.input]
    corpus = build_corpus(fragments, normalize=not args.no_normalize)
    corpus.save(args.out)
    print(f"wrote corpus with {len(corpus.sequences)} sequences "
          f"({corpus.pose_count} poses) to {args.out}")
    return 0


def cmd_train(args) -> int:
    corpus = Corpus.load(args.corpus)
    overrides = json.loads(Path(args.config).read_text()) if args.config else {}
    model = train(corpus, VAEConfig(**overrides))
    model.save(args.out)
    trace = model.training_trace["reconstruction"]
    print(f"trained {model.config.epochs} epochs; reconstruction {trace[0]:.4f} -> {trace[-1]:.4f}")
    return 0


def cmd_embed(args) -> int:
    corpus = Corpus.load(args.corpus)
    model = VAEModel.load(args.model)
    paths = [encode_sequence(model, corpus.sequence(sid)).to_dict()
             for sid in corpus.sequence_ids()]
    _write({"paths": paths}, args.out)
    return 0


def cmd_metrics(args) -> int:
    corpus = Corpus.load(args.corpus)
    if args.metrics_command == "dtw":
        d, path = dtw(corpus.sequence(args.a), corpus.sequence(args.b))
        _write({"a": args.a, "b": args.b, "distance": d, "path": path.pairs}, args.out)
    else:
        sequences = sorted(corpus.sequences_for_referent(args.referent), key=lambda s: s.id)
        _write(distance_matrix(sequences).to_dict(), args.out)
    return 0


def cmd_consensus(args) -> int:
    corpus = Corpus.load(args.corpus)
    report = variance_consensus(corpus, args.referent,
                                DbaConfig(max_iter=args.max_iter, tol=args.tol))
    _write(report.to_dict(), args.out)
    return 0


def cmd_cluster(args) -> int:
    corpus = Corpus.load(args.corpus)
    scope = _scope_ids(corpus, args.scope)
    data = corpus.flattened_map(scope)
    seeds = None if args.seeds == "auto" else [s for s in args.seeds.split(",") if s]
    model = init_clusters(data, scope, seeds=seeds, k=args.k, rng_seed=args.rng_seed)
    model = run(data, model, max_iter=args.max_iter)
    _write(model.to_dict(), args.out)
    return 0


def cmd_map(args) -> int:
    corpus = Corpus.load(args.corpus)
    model = VAEModel.load(args.model)
    paths = {sid: encode_sequence(model, corpus.sequence(sid)) for sid in corpus.sequence_ids()}
    all_points = np.concatenate([p.points for p in paths.values()])
    if None in (args.x0, args.x1, args.y0, args.y1):
        viewport = default_viewport(all_points, grid_m=args.m)
    else:
        viewport = Viewport(args.x0, args.x1, args.y0, args.y1, args.m)

    if args.map_command == "grid":
        _write(landmark_grid(model, viewport).to_dict(), args.out)
    elif args.map_command == "scatter":
        records = scatter_projection(model, corpus, referent=args.referent, paths=paths)
        _write({"records": [r.to_dict() for r in records]}, args.out)
    else:
        ids = corpus.sequence_ids() if args.referent is None else [
            s.id for s in corpus.sequences_for_referent(args.referent)]
        points = np.concatenate([paths[i].points for i in ids])
        grid = density_grid(points, viewport, resolution=args.resolution,
                            bandwidth="scott" if args.bandwidth is None else args.bandwidth)
        _write(grid.to_dict(), args.out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app_from_paths

    app = create_app_from_paths(args.corpus, model_path=args.model,
                                cache_dir=args.cache_dir, workers=args.workers,
                                frontend_dir=args.frontend)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_export(args) -> int:
    corpus = Corpus.load(args.corpus)
    consensus = {}
    for path in args.consensus or []:
        payload = json.loads(Path(path).read_text())
        consensus[payload["referent"]] = {"params": {}, "cache_key": None, "payload": payload}
    cluster_models = {}
    for i, path in enumerate(args.clusters or []):
        cluster_models[f"model-{i}"] = ClusterModel.from_dict(json.loads(Path(path).read_text()))
    annotations = dict(kv.split("=", 1) for kv in args.annotate or [])
    _write(build_export(corpus, consensus, cluster_models, annotations), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posemap",
                                     description="gesture elicitation analysis toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse datasets into a normalized corpus")
    p.add_argument("--input", action="append", required=True)
    p.add_argument("--format", choices=["canonical-json", "frames-csv"],
                   default="canonical-json")
    p.add_argument("--out", required=True)
    p.add_argument("--no-normalize", action="store_true")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("train", help="train the pose embedding")
    p.add_argument("--corpus", required=True)
    p.add_argument("--config", help="JSON file with VAEConfig overrides")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("embed", help="embed every sequence as a latent path")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("metrics", help="DTW distances")
    msub = p.add_subparsers(dest="metrics_command", required=True)
    pd = msub.add_parser("dtw")
    pd.add_argument("--corpus", required=True)
    pd.add_argument("--a", required=True)
    pd.add_argument("--b", required=True)
    pd.add_argument("--out")
    pd.set_defaults(fn=cmd_metrics)
    pm = msub.add_parser("matrix")
    pm.add_argument("--corpus", required=True)
    pm.add_argument("--referent", required=True)
    pm.add_argument("--out")
    pm.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("consensus", help="variance around the average gesture")
    p.add_argument("--referent", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--max-iter", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_consensus)

    p = sub.add_parser("cluster", help="k-means with averaged-sequence centroids")
    p.add_argument("--corpus", required=True)
    p.add_argument("--scope", required=True, help="referent:<name> or comma-separated ids")
    p.add_argument("--k", type=int)
    p.add_argument("--seeds", default="auto", help="'auto' or comma-separated ids")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_cluster)

    p = sub.add_parser("map", help="landmark grid / scatter / density artifacts")
    msub = p.add_subparsers(dest="map_command", required=True)
    for name in ("grid", "scatter", "density"):
        pm = msub.add_parser(name)
        pm.add_argument("--model", required=True)
        pm.add_argument("--corpus", required=True)
        pm.add_argument("--x0", type=float)
        pm.add_argument("--x1", type=float)
        pm.add_argument("--y0", type=float)
        pm.add_argument("--y1", type=float)
        pm.add_argument("--m", type=int, default=11)
        pm.add_argument("--referent")
        pm.add_argument("--resolution", type=int, default=64)
        pm.add_argument("--bandwidth", type=float)
        pm.add_argument("--out")
        pm.set_defaults(fn=cmd_map)

    p = sub.add_parser("serve", help="run the REST analysis service")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--cache-dir", default=".posemap-cache")
    p.add_argument("--workers", type=int, default=2)
    p.add_argument("--frontend", help="built frontend directory to mount at /ui")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("export", help="bundle analysis artifacts for sharing")
    p.add_argument("--corpus", required=True)
    p.add_argument("--consensus", action="append")
    p.add_argument("--clusters", action="append")
    p.add_argument("--annotate", action="append", help="key=value")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except PosemapError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
