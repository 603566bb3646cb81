"""Command-line entry points for the pipeline without the UI.

Subcommands: gen-synthetic, validate, embed, metrics, export-svg, serve.
Data goes to stdout (UTF-8 JSON or SVG files), diagnostics to stderr.
Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path


from . import dataset as ds_mod
from . import glyph as glyph_mod
from . import metrics as metrics_mod
from . import tsne as tsne_mod
from .errors import ArgumentError, DegenerateInput, IoError, ParseError, SchemaError
from .glyph import FlowerMode
from .metrics import DistanceKind
from .tsne import Space

USAGE_ERROR = 2
RUNTIME_ERROR = 1


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _parse_attribute_list(raw: str | None, k: int) -> list[int]:
    if raw is None:
        return list(range(k))
    tokens = [t for t in raw.split(",") if t.strip() != ""]
    if not tokens:
        raise ArgumentError("attribute filter must not be empty")
    indices = sorted({int(t) for t in tokens})
    if indices[0] < 0 or indices[-1] >= k:
        raise ArgumentError(f"attribute indices out of range for k={k}: {indices}")
    return indices


def cmd_gen_synthetic(args: argparse.Namespace) -> int:
    dataset = ds_mod.generate_synthetic(
        n=args.n, k=args.k, d=args.d, n_clusters=args.clusters,
        noise=args.noise, seed=args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fea_file = out.stem + ".fea.bin"
    ds_mod.save_manifest(dataset, out, fea_file=fea_file)
    print(json.dumps({"manifest": str(out), "fea_file": fea_file,
                      "n_records": len(dataset), "k": dataset.schema.k,
                      "fea_dim": dataset.fea_dim}))
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    dataset = ds_mod.load_manifest(args.manifest)
    print(json.dumps({"ok": True, "n_records": len(dataset),
                      "k": dataset.schema.k, "fea_dim": dataset.fea_dim,
                      "content_hash": dataset.content_hash()}))
    return 0


def cmd_embed(args: argparse.Namespace) -> int:
    dataset = ds_mod.load_manifest(args.manifest)
    space = Space(args.space)
    config = tsne_mod.default_config(space, len(dataset), dataset.fea_dim,
                                     seed=args.seed)
    overrides = {}
    for flag, field in (("perplexity", "perplexity"), ("n_iter", "n_iter"),
                        ("learning_rate", "learning_rate"), ("theta", "theta"),
                        ("pca_predim", "pca_predim")):
        value = getattr(args, flag)
        if value is not None:
            overrides[field] = value
    if overrides:
        config = replace(config, **overrides)
    result = tsne_mod.embed_dataset_space(dataset, space, config,
                                          cache_dir=args.cache_dir)
    payload = json.dumps(result.to_json(), indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
        print(json.dumps({"out": str(args.out), "space": space.value,
                          "n_points": int(result.coords.shape[0])}),
              file=sys.stderr)
    else:
        sys.stdout.write(payload)
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    dataset = ds_mod.load_manifest(args.manifest)
    indices = _parse_attribute_list(args.attributes, dataset.schema.k)
    summary = metrics_mod.confusion(dataset.records, indices, args.threshold)
    per_attribute = []
    for j in indices:
        c = metrics_mod.confusion(dataset.records, [j], args.threshold)
        ap = metrics_mod.average_precision(
            [float(r.prd[j]) for r in dataset.records],
            [int(r.act[j]) for r in dataset.records]) if dataset.records else None
        per_attribute.append({
            "index": j,
            "name": dataset.schema.names[j],
            "confusion": c.to_json(),
            "report": metrics_mod.report(c).to_json(),
            "ap": ap,
        })
    payload = {
        "threshold": args.threshold,
        "attributes": indices,
        "confusion": summary.to_json(),
        "report": metrics_mod.report(summary).to_json(),
        "per_attribute": per_attribute,
        "map": metrics_mod.mean_average_precision(dataset),
    }
    print(json.dumps(payload, indent=1))
    return 0


def cmd_export_svg(args: argparse.Namespace) -> int:
    dataset = ds_mod.load_manifest(args.manifest)
    embedding = tsne_mod.load_embedding(args.embedding)
    coords = embedding.coords
    if coords.shape[0] != len(dataset):
        raise SchemaError(
            f"embedding has {coords.shape[0]} points for {len(dataset)} records")
    indices = _parse_attribute_list(args.attributes, dataset.schema.k)
    mode = FlowerMode(args.mode)
    kind = DistanceKind(args.distance)
    max_distance = 0.0
    if dataset.records:
        max_distance = max(metrics_mod.error_distance(r.act, r.prd, kind)
                           for r in dataset.records)
    glyphs = [
        glyph_mod.layout_flower(record, dataset.schema, indices, mode,
                                distance_kind=kind, max_distance=max_distance,
                                center=(float(xy[0]), float(xy[1])),
                                radius=args.radius)
        for record, xy in zip(dataset.records, coords)
    ]
    if coords.shape[0] > 0:
        xmin, ymin = coords.min(axis=0)
        xmax, ymax = coords.max(axis=0)
        pad_x = (xmax - xmin) * 0.05 + 1.0
        pad_y = (ymax - ymin) * 0.05 + 1.0
        viewport = (float(xmin - pad_x), float(ymin - pad_y),
                    float(xmax + pad_x), float(ymax + pad_y))
    else:
        viewport = (-1.0, -1.0, 1.0, 1.0)
    svg = glyph_mod.render_svg(glyphs, args.width, args.height, viewport)
    Path(args.out).write_text(svg, encoding="utf-8")
    print(json.dumps({"out": str(args.out), "glyphs": len(glyphs)}),
          file=sys.stderr)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir, cache_dir=args.cache_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attrflower",
        description="Inspect multi-attribute classifier output: synthetic "
                    "datasets, embeddings, metrics, flower glyphs, service.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synthetic", help="generate a synthetic dataset")
    p.add_argument("--n", type=int, default=1000, help="number of records")
    p.add_argument("--k", type=int, default=ds_mod.DEFAULT_K, help="attribute count")
    p.add_argument("--d", type=int, default=ds_mod.DEFAULT_FEA_DIM, help="feature dimension")
    p.add_argument("--clusters", type=int, default=5, help="cluster count")
    p.add_argument("--noise", type=float, default=0.1,
                   help="per-entry probability of corrupting PRD toward uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="manifest output path")
    p.set_defaults(func=cmd_gen_synthetic)

    p = sub.add_parser("validate", help="validate a dataset manifest")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("embed", help="compute a t-SNE embedding for one space")
    p.add_argument("--manifest", required=True)
    p.add_argument("--space", required=True, choices=[s.value for s in Space])
    p.add_argument("--perplexity", type=float, default=None)
    p.add_argument("--n-iter", dest="n_iter", type=int, default=None)
    p.add_argument("--learning-rate", dest="learning_rate", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--pca-predim", dest="pca_predim", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--out", default=None, help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("metrics", help="confusion metrics and AP/mAP report")
    p.add_argument("--manifest", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--attributes", default=None,
                   help="comma-separated attribute indices (default: all)")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("export-svg", help="render attribute flowers to SVG")
    p.add_argument("--manifest", required=True)
    p.add_argument("--embedding", required=True, help="EmbeddingResult JSON path")
    p.add_argument("--mode", default="joint",
                   choices=[m.value for m in FlowerMode])
    p.add_argument("--attributes", default=None)
    p.add_argument("--distance", default="euclidean",
                   choices=[k.value for k in DistanceKind])
    p.add_argument("--width", type=float, default=960.0)
    p.add_argument("--height", type=float, default=720.0)
    p.add_argument("--radius", type=float, default=10.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_svg)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--cache-dir", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ArgumentError as exc:
        return _fail(USAGE_ERROR, str(exc))
    except (ParseError, SchemaError, IoError, DegenerateInput, OSError,
            json.JSONDecodeError) as exc:
        return _fail(RUNTIME_ERROR, str(exc))


if __name__ == "__main__":
    sys.exit(main())
