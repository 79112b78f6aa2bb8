"""Command-line front end: refine, distinguish, power-check, fixtures, predict.

Exit codes: 0 success, 1 usage error, 2 runtime error. Identical
invocations produce byte-identical JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .generate import erdos_renyi, ring_lattice
from .graph import GraphError, load_edgelist, load_labels
from .linkpred import LinkPredError, TrainConfig, benchmark
from .harness import (
    Corpus,
    builtin_fixtures,
    fixtures_corpus,
    power_check,
    random_corpus,
)
from .refine import (
    RefinementError,
    TestKind,
    indistinguishable,
    refine_to_stable,
)

USAGE_ERROR = 1
RUNTIME_ERROR = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_pair(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected 'p,q', got {text!r}")
    try:
        p, q = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"non-integer pair {text!r}")
    return (p, q)


def _parse_kind(name: str) -> TestKind:
    try:
        return TestKind.parse(name)
    except RefinementError as exc:
        raise UsageError(str(exc))


def _load_graph(path: str, labels_path: str = None):
    labels = None
    if labels_path is not None:
        labels = load_labels(Path(labels_path).read_text())
    return load_edgelist(Path(path).read_text(), labels)


def _emit(args, text: str):
    if not args.quiet:
        print(text)


# -- commands ----------------------------------------------------------------


def cmd_refine(args) -> int:
    kind = _parse_kind(args.test)
    g = _load_graph(args.graph, args.labels)
    mask = _parse_pair(args.mask) if args.mask else None
    result = refine_to_stable(kind, g, mask=mask, max_iters=args.max_iters)
    if args.output == "json":
        print(result.to_json())
        return 0
    _emit(args, f"test: {kind.value}")
    _emit(args, f"stable_at: {result.stable_at}")
    for t, cmap in enumerate(result.history):
        _emit(args, f"iteration {t}: {cmap.num_classes()} classes")
    if mask is not None:
        final = result.final
        if kind.pair_indexed:
            target_color = final.colors[tuple(mask)]
        else:
            target_color = final.colors[mask[0]]
        size = sum(1 for c in final.colors.values() if c == target_color)
        _emit(args, f"target stable color class size: {size}")
    return 0


def cmd_distinguish(args) -> int:
    kind = _parse_kind(args.test)
    ga = _load_graph(args.graph_a)
    gb = _load_graph(args.graph_b)
    ea = _parse_pair(args.link_a)
    eb = _parse_pair(args.link_b)
    res = indistinguishable(kind, ea, ga, eb, gb, max_iters=args.max_iters)
    if args.output == "json":
        print(
            json.dumps(
                {
                    "test": kind.value,
                    "distinguished": res.distinguished,
                    "iteration": res.distinguished_at,
                    "iterations_run": res.iterations,
                    "stable": res.stable,
                }
            )
        )
    elif res.distinguished:
        _emit(args, f"distinguished at iteration {res.distinguished_at}")
    else:
        state = f"stable at {res.iterations}" if res.stable else "iteration cap reached"
        _emit(args, f"indistinguishable ({state})")
    return 0


def _build_corpus(spec: str) -> Corpus:
    parts = []
    for piece in spec.split("+"):
        piece = piece.strip()
        if piece == "fixtures":
            parts.append(fixtures_corpus())
        elif piece.startswith("random"):
            kw = {}
            if ":" in piece:
                for item in piece.split(":", 1)[1].split(","):
                    k, _, v = item.partition("=")
                    if k not in ("count", "seed"):
                        raise UsageError(f"unknown corpus option {k!r}")
                    kw[k] = int(v)
            parts.append(random_corpus(**kw))
        elif piece == "default":
            parts.append(fixtures_corpus())
            parts.append(random_corpus())
        else:
            raise UsageError(
                f"unknown corpus spec {piece!r}; use default, fixtures, "
                "or random[:count=N,seed=S], joined with '+'"
            )
    return parts[0] if len(parts) == 1 else Corpus.merge(*parts)


def cmd_power_check(args) -> int:
    corpus = _build_corpus(args.corpus)
    kinds = None
    if args.tests:
        kinds = [_parse_kind(name) for name in args.tests.split(",")]
    report = power_check(corpus, kinds=kinds, max_iters=args.max_iters)
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
        _emit(args, f"wrote {args.out}")
    if args.output == "json":
        print(text)
    else:
        _emit(args, f"instances: {report.num_instances}")
        _emit(args, f"instance pairs: {report.num_pairs}")
        for name, entry in sorted(report.implications.items()):
            status = "holds" if entry["holds"] else f"{entry['violations']} violations"
            _emit(args, f"{name}: {status}")
    return 0


def cmd_fixtures(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    for fixture in builtin_fixtures():
        entry = {
            "name": fixture.name,
            "target_a": list(fixture.target_a),
            "target_b": list(fixture.target_b),
            "note": fixture.note,
            "expected": {},
            "files": {},
        }
        for side, g in (("a", fixture.graph_a), ("b", fixture.graph_b)):
            path = out / f"{fixture.name}-{side}.edgelist"
            lines = [f"# {fixture.name} side {side}, n={g.n}"]
            lines += [f"{u} {v}" for u, v in g.edge_list()]
            path.write_text("\n".join(lines) + "\n")
            entry["files"][side] = path.name
        for kind, expect in sorted(fixture.expected.items(), key=lambda kv: kv[0].value):
            verdict = indistinguishable(
                kind, fixture.target_a, fixture.graph_a, fixture.target_b, fixture.graph_b
            )
            if verdict.distinguished != expect:
                raise RefinementError(
                    f"fixture {fixture.name}: {kind.value} verdict "
                    f"{verdict.distinguished} != expected {expect}"
                )
            entry["expected"][kind.value] = {
                "distinguished": expect,
                "iteration": verdict.distinguished_at,
            }
        manifest.append(entry)
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    _emit(args, f"wrote {len(manifest)} fixtures and {manifest_path}")
    return 0


def _generate_graph(spec: str):
    name, _, rest = spec.partition(":")
    kw = {}
    if rest:
        for item in rest.split(","):
            k, _, v = item.partition("=")
            kw[k] = float(v) if "." in v else int(v)
    try:
        if name == "ring":
            return ring_lattice(
                int(kw.get("n", 200)), int(kw.get("k", 4)),
                float(kw.get("rewire", 0.1)), seed=int(kw.get("seed", 0)),
            )
        if name == "er":
            return erdos_renyi(
                int(kw.get("n", 200)), float(kw.get("p", 0.03)),
                seed=int(kw.get("seed", 0)),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad generator spec {spec!r}: {exc}")
    raise UsageError(f"unknown generator {name!r}; use ring:... or er:...")


def cmd_predict(args) -> int:
    kind = _parse_kind(args.test)
    if bool(args.graph) == bool(args.generate):
        raise UsageError("predict needs exactly one of --graph or --generate")
    if args.graph:
        g = _load_graph(args.graph)
        dataset = os.path.basename(args.graph)
    else:
        g = _generate_graph(args.generate)
        dataset = args.generate
    config = TrainConfig(seed=args.seed)
    report = benchmark(
        g, kind, split_seed=args.seed, train_config=config,
        width=args.width, dataset=dataset, workers=args.threads,
    )
    if args.output == "json":
        print(report.to_json())
    else:
        _emit(args, f"dataset: {report.dataset} (n={report.n}, m={report.m})")
        _emit(args, f"test: {kind.value}")
        _emit(args, f"val AUC: {report.val_auc:.4f}")
        _emit(args, f"test AUC: {report.test_auc:.4f}")
        _emit(args, f"featurize seconds: {report.featurize_seconds:.2f}")
        _emit(args, f"isolated nodes: {report.isolated_nodes}")
    return 0


# -- entry point -------------------------------------------------------------


GLOBAL_DEFAULTS = {
    "seed": 0,
    "max_iters": None,
    "output": "table",
    "quiet": False,
}


def _global_flags() -> argparse.ArgumentParser:
    # Attached to the main parser and every subparser so the flags may
    # appear on either side of the command; SUPPRESS keeps the subparser
    # from clobbering values parsed before the command name.
    common = argparse.ArgumentParser(add_help=False)
    d = argparse.SUPPRESS
    common.add_argument("--seed", type=int, default=d)
    common.add_argument("--max-iters", type=int, default=d)
    common.add_argument("--output", choices=("json", "table"), default=d)
    common.add_argument("--quiet", action="store_true", default=d)
    common.add_argument("--threads", type=int, default=d)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = _Parser(prog="wl2link", description=__doc__, parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add_parser("refine", help="refine one graph to stability")
    p.add_argument("--graph", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--mask", default=None, help="target pair 'p,q'")
    p.add_argument("--labels", default=None)
    p.set_defaults(func=cmd_refine)

    p = add_parser("distinguish", help="compare two (graph, link) instances")
    p.add_argument("--graph-a", required=True)
    p.add_argument("--link-a", required=True)
    p.add_argument("--graph-b", required=True)
    p.add_argument("--link-b", required=True)
    p.add_argument("--test", required=True)
    p.set_defaults(func=cmd_distinguish)

    p = add_parser("power-check", help="verify the power partial order")
    p.add_argument("--corpus", default="default")
    p.add_argument("--tests", default=None, help="comma-separated test kinds")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_power_check)

    p = add_parser("fixtures", help="write fixture edge lists + manifest")
    p.add_argument("--out", default="fixtures")
    p.set_defaults(func=cmd_fixtures)

    p = add_parser("predict", help="link-prediction AUC benchmark")
    p.add_argument("--graph", default=None)
    p.add_argument("--generate", default=None, help="ring:n=..,k=..,rewire=.. or er:n=..,p=..")
    p.add_argument("--test", required=True)
    p.add_argument("--width", type=int, default=8)
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for name, value in GLOBAL_DEFAULTS.items():
            if not hasattr(args, name):
                setattr(args, name, value)
        if not hasattr(args, "threads"):
            args.threads = int(os.environ.get("WL2_THREADS", "1"))
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (GraphError, RefinementError, LinkPredError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
