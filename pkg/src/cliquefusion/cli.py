"""Command-line front end.

Exit status: 0 success, 1 domain error (bad reference, unknown cluster, tick
out of range, ...), 2 unreadable input or malformed JSON.
"""
from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path
from typing import Any

from . import __version__
from .fusion import integrated_graph, to_dot
from .gen import KINDS, StreamModel, generate_streams
from .model import SYNTAX, Document, ModelError, dumps, load_document, validate
from .plan import COST_MODELS, PlanInfeasible, plan_for_tick, recheck
from .reveal import StructureSpec, reveal
from .stream import TrackConfig, run, tick_graph


class CliError(Exception):
    def __init__(self, message: str, status: int = 1):
        super().__init__(message)
        self.status = status


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", 2) from None


def _load(path: str) -> tuple[Document, str]:
    text = _read(path)
    try:
        doc = load_document(text)
    except ModelError as exc:
        raise CliError(str(exc), 2 if exc.code == SYNTAX else 1) from None
    return doc, hashlib.sha256(text.encode("utf-8")).hexdigest()


def _spec(doc: Document, args) -> StructureSpec:
    d: dict[str, Any] = dict(doc.detection)
    flags = {
        "threshold": args.threshold,
        "min_size": args.min_size,
        "max_missing_edges": args.quasi_edges,
        "max_offending_vertices": args.quasi_vertices,
        "secondary_threshold": args.secondary_threshold,
        "sub_min_size": args.sub_min_size,
    }
    d.update({k: v for k, v in flags.items() if v is not None})
    if args.all_sets:
        d["maximal_only"] = False
    try:
        spec = StructureSpec.from_dict(d)
        spec.check(doc.model.scale.levels)
    except (TypeError, ValueError) as exc:
        raise CliError(f"bad detection settings: {exc}") from None
    return spec


def _min_size(text: str) -> int | str:
    if text == "cluster":
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer or 'cluster'") from None


def _report(doc: Document, digest: str, command: str, payload: dict) -> dict:
    m = doc.model
    return {
        "tool": "cliquefusion",
        "version": __version__,
        "command": command,
        "input_sha256": digest,
        "model": {"levels": m.scale.levels, "components": len(m.components),
                  "functions": len(m.functions), "clusters": len(m.clusters)},
        "payload": payload,
    }


def _write(path: str | None, text: str) -> None:
    if path:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot write {path}: {exc}", 2) from None


def _scenario(doc: Document):
    if doc.scenario is None:
        raise CliError("document has no scenario")
    return doc.scenario


# -- commands ------------------------------------------------------------------

def cmd_validate(args, out) -> int:
    text = _read(args.file)
    try:
        doc = load_document(text, strict=False)
    except ModelError as exc:
        raise CliError(str(exc), 2) from None
    problems = validate(doc.model, doc.scenario)
    if not args.quiet:
        for p in problems:
            print(p, file=out)
        if not problems:
            print("ok", file=out)
    if args.json:
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        _write(args.json, dumps(_report(doc, digest, "validate", {
            "violations": [{"code": p.code, "entity": p.entity, "message": p.message}
                           for p in problems]})))
    return 1 if problems else 0


def cmd_reveal(args, out) -> int:
    doc, digest = _load(args.file)
    m = doc.model
    if args.cluster not in m.clusters:
        raise CliError(f"unknown cluster {args.cluster!r}")
    spec = _spec(doc, args)
    sc = doc.scenario
    if sc is None:
        raise CliError("document has no scenario states")
    if not 0 <= args.tick < sc.ticks:
        raise CliError(f"tick {args.tick} outside 0..{sc.ticks - 1}")
    g = integrated_graph(m, args.cluster, sc.assignment(args.tick))
    try:
        found = reveal(g, spec)
    except ValueError as exc:
        raise CliError(str(exc)) from None

    if not args.quiet:
        print(f"cluster {args.cluster} at tick {args.tick}: "
              f"{len(g.vertices)} vertices, {len(g.edges)} edges", file=out)
        for s in found:
            miss = " ".join(f"{u}-{v}" for u, v in s.missing_edges) or "-"
            off = ",".join(s.offending_vertices) or "-"
            print(f"{s.canonical_id}  missing: {miss}  offending: {off}", file=out)
        if not found:
            print("no structures", file=out)
    _write(args.dot, to_dot(g, args.cluster))
    _write(args.json, dumps(_report(doc, digest, "reveal", {
        "cluster": args.cluster, "tick": args.tick, "graph": g.summary(),
        "spec": spec.resolve(g).to_dict(),
        "structures": [s.to_dict() for s in found]})))
    return 0


def _track_config(doc: Document, args) -> TrackConfig:
    k = args.k if args.k is not None else doc.track.get("k", 2)
    m = args.m if args.m is not None else doc.track.get("m", 3)
    try:
        return TrackConfig(k, m)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def cmd_run(args, out) -> int:
    doc, digest = _load(args.file)
    sc = _scenario(doc)
    spec = _spec(doc, args)
    cfg = _track_config(doc, args)
    try:
        log = run(doc.model, sc, spec, cfg)
    except ValueError as exc:
        raise CliError(str(exc)) from None

    if args.dot_dir:
        d = Path(args.dot_dir)
        try:
            d.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CliError(f"cannot create {d}: {exc}", 2) from None
        for t in range(sc.ticks):
            _write(str(d / f"tick_{t:03d}.dot"), to_dot(tick_graph(doc.model, sc, t), f"tick {t}"))

    if not args.quiet:
        for r in log.records:
            print(f"t{r.tick:<3} {r.cluster or 'idle':<8} {' '.join(r.revealed) or '-'}", file=out)
        if not log.tracks:
            print("no tracks", file=out)
        for tid, tr in log.tracks.items():
            init = "-" if tr.initiated_at is None else f"t{tr.initiated_at}"
            print(f"track {tid}  hits: {_ticks(tr.hit_ticks)}  active: {_ticks(tr.active_ticks)}"
                  f"  initiated: {init}", file=out)
    _write(args.json, dumps(_report(doc, digest, "run", {"spec": spec.to_dict(), **log.to_dict()})))
    return 0


def _ticks(ts) -> str:
    return ",".join(f"t{t}" for t in ts) or "-"


def cmd_plan(args, out) -> int:
    doc, digest = _load(args.file)
    sc = _scenario(doc)
    if not 0 <= args.tick < sc.ticks:
        raise CliError(f"tick {args.tick} outside 0..{sc.ticks - 1}")
    spec = _spec(doc, args)
    try:
        g, targets, plan = plan_for_tick(doc.model, sc, args.tick, spec, COST_MODELS[args.cost])
    except PlanInfeasible as exc:
        raise CliError(f"no plan: {exc}") from None
    except ValueError as exc:
        raise CliError(str(exc)) from None
    left = recheck(doc.model, sc, args.tick, spec, plan.actions)

    if not args.quiet:
        print(f"tick {args.tick} ({sc.chain[args.tick] or 'idle'}): {len(targets)} target(s)", file=out)
        for s in targets:
            print(f"  {s.canonical_id}", file=out)
        acts = ", ".join(str(a) for a in plan.actions) or "no actions"
        print(f"plan: {acts}  cost {plan.total_cost:g}", file=out)
        alts = " | ".join(", ".join(str(a) for a in alt) or "-" for alt in plan.alternatives)
        print(f"alternatives: {alts}", file=out)
        print(f"post-plan structures: {len(left)}", file=out)
    _write(args.json, dumps(_report(doc, digest, "plan", {
        "tick": args.tick, "cluster": sc.chain[args.tick],
        "targets": [s.to_dict() for s in targets], **plan.to_dict(),
        "post_plan_structures": len(left)})))
    return 0


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from None


def _matrix(text: str) -> tuple[tuple[float, ...], ...]:
    return tuple(_floats(row) for row in text.split(";"))


def _pins(text: str) -> dict[str, int]:
    try:
        return {k: int(v) for k, v in (item.split("=") for item in text.split(","))}
    except ValueError:
        raise argparse.ArgumentTypeError("expected comp=level,comp=level") from None


def cmd_gen(args, out) -> int:
    doc, digest = _load(args.file)
    ticks = args.ticks
    if ticks is None:
        ticks = doc.scenario.ticks if doc.scenario else 1
    sm = StreamModel(args.model, args.initial, args.transition, args.seed, args.pin)
    try:
        streams = generate_streams(doc.model, ticks, sm)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    block = dumps({"states": {c: list(s) for c, s in streams.items()}})
    if args.json:
        _write(args.json, block)
    elif not args.quiet:
        out.write(block)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the JSON report here")
    common.add_argument("--quiet", action="store_true", help="no human-readable output")

    detect = argparse.ArgumentParser(add_help=False)
    detect.add_argument("--threshold", type=int, help="worst acceptable level l")
    detect.add_argument("--min-size", type=_min_size, help="integer or 'cluster'")
    detect.add_argument("--quasi-edges", type=int, help="missing-edge budget")
    detect.add_argument("--quasi-vertices", type=int, help="offending-vertex budget")
    detect.add_argument("--secondary-threshold", type=int, help="cap on offending levels")
    detect.add_argument("--sub-min-size", type=int, help="report sub-cliques down to this size")
    detect.add_argument("--all-sets", action="store_true", help="report non-maximal sets too")

    ap = argparse.ArgumentParser(prog="cliquefusion", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a model document")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("reveal", parents=[common, detect], help="structures in one cluster graph")
    p.add_argument("file")
    p.add_argument("--cluster", required=True)
    p.add_argument("--tick", type=int, default=0, help="which state column to use")
    p.add_argument("--dot", metavar="PATH", help="write the fused graph as DOT")
    p.set_defaults(func=cmd_reveal)

    p = sub.add_parser("run", parents=[common, detect], help="replay the scenario with k-of-m tracking")
    p.add_argument("file")
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--dot-dir", metavar="DIR", help="dump tick_NNN.dot per tick")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("plan", parents=[common, detect], help="cheapest repair at one tick")
    p.add_argument("file")
    p.add_argument("--tick", type=int, required=True)
    p.add_argument("--cost", choices=sorted(COST_MODELS), default="step")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("gen", parents=[common], help="generate a states block")
    p.add_argument("file")
    p.add_argument("--model", choices=KINDS, default="iid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ticks", type=int)
    p.add_argument("--initial", type=_floats, help="p1,...,pL")
    p.add_argument("--transition", type=_matrix, help="rows separated by ';'")
    p.add_argument("--pin", type=_pins, help="constant levels, e.g. s1=2,s3=1")
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.status
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if exc.code == SYNTAX else 1


if __name__ == "__main__":
    raise SystemExit(main())
