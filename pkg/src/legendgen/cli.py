"""Command line interface: extract, generate, score, simulate, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .design import LegendSpec
from .errors import LegendgenError
from .fixtures import corpus_split
from .model import init_model
from .pipeline import Document
from .search import GAParams


def _load_document(path: str) -> Document:
    return Document.from_svg(Path(path).read_text(encoding="utf-8"))


def cmd_extract(args) -> int:
    doc = _load_document(args.input)
    print(json.dumps(doc.extraction_report(), indent=2))
    return 0


def cmd_generate(args) -> int:
    doc = _load_document(args.input)
    model = init_model(args.seed)
    params = GAParams(population=args.population, generations=args.generations,
                      seed=args.seed)
    result = doc.candidates(model, params, top_k=args.top_k)
    out = Path(args.output)
    for rank, (spec, score) in enumerate(result.ranked):
        target = out if rank == 0 else out.with_name(f"{out.stem}-{rank}{out.suffix}")
        target.write_text(doc.composed_svg(spec), encoding="utf-8")
        print(f"#{rank}: score={score:.6f} -> {target}")
        if rank + 1 >= args.top_k:
            break
    return 0


def cmd_score(args) -> int:
    doc = _load_document(args.input)
    spec = LegendSpec.from_record(json.loads(Path(args.spec).read_text(encoding="utf-8")))
    mv = doc.metrics_for(spec)
    model = init_model(args.seed)
    record = {k: round(v, 6) for k, v in mv.to_record().items()}
    record["model_score"] = round(model.score(mv), 6)
    print(json.dumps(record, indent=2))
    return 0


def cmd_simulate(args) -> int:
    from .feedback import PROFILES, run_session

    if args.profile not in PROFILES:
        print(f"unknown profile {args.profile}; choose from {PROFILES}", file=sys.stderr)
        return 2
    if args.charts:
        paths = sorted(Path(args.charts).glob("*.svg"))
        docs = [Document.from_svg(p.read_text(encoding="utf-8")) for p in paths]
        split = max(len(docs) * 3 // 4, 1)
        training, heldout = docs[:split], docs[split:] or docs[:1]
    else:
        train_svgs, held_svgs = corpus_split()
        training = [Document.from_svg(t) for _, t in train_svgs]
        heldout = [Document.from_svg(t) for _, t in held_svgs]
    res = run_session(args.profile, training, heldout, target_tuples=args.rounds,
                      seed=args.seed)
    for n in sorted(res.accuracy_at):
        print(f"alignment after {n:3d} tuples: {res.accuracy_at[n]:.3f}")
    print(f"tuples collected: {len(res.tuples)} over {res.rounds} rounds")
    final = res.accuracy_at[max(res.accuracy_at)]
    print(f"final alignment accuracy: {final:.3f}")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(port=args.port, data_dir=args.data_dir, host=args.host)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="legendgen",
                                description="legend generation for SVG charts")
    sub = p.add_subparsers(dest="command", required=True)

    px = sub.add_parser("extract", help="extraction report for a chart")
    px.add_argument("input")
    px.set_defaults(fn=cmd_extract)

    pg = sub.add_parser("generate", help="search for legends and write composited SVGs")
    pg.add_argument("input")
    pg.add_argument("-o", "--output", required=True)
    pg.add_argument("--top-k", type=int, default=1)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--population", type=int, default=50)
    pg.add_argument("--generations", type=int, default=100)
    pg.set_defaults(fn=cmd_generate)

    ps = sub.add_parser("score", help="metric vector and model score for a spec")
    ps.add_argument("input")
    ps.add_argument("--spec", required=True)
    ps.add_argument("--seed", type=int, default=0)
    ps.set_defaults(fn=cmd_score)

    pm = sub.add_parser("simulate", help="simulated preference-learning session")
    pm.add_argument("--profile", required=True)
    pm.add_argument("--rounds", type=int, default=50)
    pm.add_argument("--charts", default=None, help="directory of SVG charts")
    pm.add_argument("--seed", type=int, default=0)
    pm.set_defaults(fn=cmd_simulate)

    pv = sub.add_parser("serve", help="run the HTTP service")
    pv.add_argument("--port", type=int, default=8000)
    pv.add_argument("--host", default="127.0.0.1")
    pv.add_argument("--data-dir", default="legendgen-data")
    pv.set_defaults(fn=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except LegendgenError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
