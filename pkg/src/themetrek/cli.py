"""Command-line workflow: ingest, simmatrix, evaluate, recommend, serve.

Exit codes: 0 success, 2 missing file or I/O problem, 3 validation failure
(bad data, unknown measure or method), 4 unknown item id.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import ValidationError
from .evaluate import run_experiment
from .workspace import (
    ENV_WORKSPACE,
    UnknownItemError,
    Workspace,
    parse_measure,
    parse_method_spec,
    recommendation_to_dict,
)

EXIT_OK = 0
EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_UNKNOWN_ITEM = 4

DEFAULT_PRIME = "cosidf/central,cosidf/both,cf"
SWEEP_KS = tuple(range(10, 101, 10))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="themetrek",
        description="Theme-based episode similarity and rating prediction.",
    )
    parser.add_argument(
        "--workspace",
        help=f"workspace directory or config file (default: ${ENV_WORKSPACE} or cwd)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="load and validate every artifact")
    p_ingest.add_argument(
        "--prime",
        default=DEFAULT_PRIME,
        help="comma-separated measure tokens to cache, each optionally "
        "suffixed /LEVEL (default: %(default)s); pass '' to skip priming",
    )

    p_sim = sub.add_parser("simmatrix", help="build one similarity matrix")
    p_sim.add_argument("--measure", required=True, help="tfidf, lsi:<p>, jaccard, "
                       "dice, cosidf, path, wup, lch, lin, res, jcn, or cf")
    p_sim.add_argument("--p", type=float, default=None, help="softness exponent "
                       "for ontology measures (or LSI rank)")
    p_sim.add_argument("--level", choices=("central", "peripheral", "both"),
                       default=None, help="theme level for set/ontology measures")
    p_sim.add_argument("--out", default=None, help="output path "
                       "(default: the cache file)")

    p_eval = sub.add_parser("evaluate", help="repeated-holdout RMSE comparison")
    p_eval.add_argument("--methods", required=True,
                        help="comma-separated method specs, e.g. "
                        "'iknn:sim=lsi-40:k=40,globalavg'")
    p_eval.add_argument("--scenario", choices=("warm", "cold"), default="warm")
    p_eval.add_argument("--repeats", type=int, default=30)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--test-fraction", type=float, default=0.3)
    p_eval.add_argument("--paired-test", action="store_true",
                        help="also report signed-rank p-values")
    p_eval.add_argument("--sweep-k", action="store_true",
                        help="expand each method over k=10..100 step 10")
    p_eval.add_argument("--out", required=True, help="directory for report TSVs")

    p_rec = sub.add_parser("recommend", help="top-k similar episodes")
    p_rec.add_argument("--item", required=True, help="query item id")
    p_rec.add_argument("--measure", default="cosidf")
    p_rec.add_argument("--p", type=float, default=None)
    p_rec.add_argument("--level", choices=("central", "peripheral", "both"),
                       default="central")
    p_rec.add_argument("--k", type=int, default=10)
    p_rec.add_argument("--json", action="store_true", help="emit JSON")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--no-prime", action="store_true",
                         help="skip cache priming at startup")
    p_serve.add_argument("--static", default=None,
                         help="directory with the built explorer UI "
                         "(default: frontend/dist next to the package, if present)")
    return parser


def _prime_specs(raw: str):
    specs = []
    for token in filter(None, (t.strip() for t in raw.split(","))):
        token, _, level = token.partition("/")
        specs.append(parse_measure(token, level=level or None))
    return specs


def cmd_ingest(ws: Workspace, args) -> int:
    report = ws.load_all()
    print(f"workspace: {ws.paths['ratings'].parent}")
    print(f"  themes: {report['themes']}")
    print(f"  items: {report['items']} ({report['annotated_items']} annotated, "
          f"{report['transcripts']} transcribed)")
    print(f"  ratings: {report['ratings']} "
          f"({report['users']} users, {report['rated_items']} rated items)")
    for spec in _prime_specs(args.prime):
        matrix = ws.similarity(spec)
        print(f"  primed {spec.slug}: {len(matrix.scores)} pairs")
    return EXIT_OK


def cmd_simmatrix(ws: Workspace, args) -> int:
    spec = parse_measure(args.measure, p=args.p, level=args.level)
    out = Path(args.out) if args.out else ws.paths["cache"] / f"{spec.slug}.tsv"
    if args.out:
        out.parent.mkdir(parents=True, exist_ok=True)
    pairs = ws.export_matrix(spec, out)
    print(f"wrote {spec.slug} ({pairs} pairs) to {out}")
    return EXIT_OK


def _expand_sweep(specs: list[str]) -> list[str]:
    expanded = []
    for spec in specs:
        name, options = parse_method_spec(spec)
        options.pop("k", None)
        base = name + "".join(f":{key}={value}" for key, value in options.items())
        expanded.extend(f"{base}:k={k}" for k in SWEEP_KS)
    return expanded


def cmd_evaluate(ws: Workspace, args) -> int:
    specs = [s.strip() for s in args.methods.split(",") if s.strip()]
    if not specs:
        raise ValidationError("no method specs given")
    if args.sweep_k:
        specs = _expand_sweep(specs)
    methods = [ws.make_predictor(s) for s in specs]
    report = run_experiment(
        ws.ratings,
        methods,
        scenario=args.scenario,
        repeats=args.repeats,
        master_seed=args.seed,
        test_fraction=args.test_fraction,
        paired_test=args.paired_test,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "detail.tsv").write_text(report.detail_tsv(), encoding="utf-8")
    (out / "summary.tsv").write_text(report.summary_tsv(), encoding="utf-8")
    print(report.render_table(), end="")
    print(f"reports written to {out}")
    return EXIT_OK


def cmd_recommend(ws: Workspace, args) -> int:
    spec = parse_measure(args.measure, p=args.p, level=args.level)
    result = ws.recommend(args.item, spec, k=args.k, level=args.level)
    if args.json:
        print(json.dumps(recommendation_to_dict(result, ws.ontology), indent=2))
        return EXIT_OK
    title = ws.catalog.get(args.item).title
    print(f"episodes similar to {title} ({args.item}) "
          f"by {spec.token} on {result.level} themes:")
    if not result.entries:
        print("  (none)")
    for pos, entry in enumerate(result.entries, start=1):
        shared = "; ".join(entry.shared_themes) or "-"
        print(f"  {pos:2d}. {entry.title} ({entry.item_id}, {entry.series})  "
              f"score={entry.score:.6f}  shared: {shared}")
    return EXIT_OK


def cmd_serve(ws: Workspace, args) -> int:
    import uvicorn

    from .service import create_app

    static = args.static
    if static is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static = candidate if candidate.is_dir() else None
    app = create_app(ws, prime=not args.no_prime, static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ws = Workspace.open(args.workspace)
        handler = {
            "ingest": cmd_ingest,
            "simmatrix": cmd_simmatrix,
            "evaluate": cmd_evaluate,
            "recommend": cmd_recommend,
            "serve": cmd_serve,
        }[args.command]
        return handler(ws, args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except UnknownItemError as exc:
        print(f"error: unknown item {exc.args[0]!r}", file=sys.stderr)
        return EXIT_UNKNOWN_ITEM
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
