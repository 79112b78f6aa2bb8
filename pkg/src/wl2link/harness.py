"""Corpus construction and empirical verification of the power partial order."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field

from .generate import complete_graph, cycle_graph, erdos_renyi
from .graph import Graph, disjoint_union
from .refine import (
    ALL_KINDS,
    Interner,
    TestKind,
    default_max_iters,
    make_session,
)
from .unroll import link_certificate


@dataclass
class Corpus:
    """Instances are (graph, ordered target pair); deterministic given spec."""

    instances: list
    spec: dict

    def __len__(self):
        return len(self.instances)

    @staticmethod
    def merge(*parts) -> "Corpus":
        instances = []
        for part in parts:
            instances.extend(part.instances)
        return Corpus(instances, {"merged": [p.spec for p in parts]})


def random_corpus(
    count: int = 200,
    seed: int = 7,
    n_range=(4, 12),
    edge_probs=(0.2, 0.35, 0.5),
) -> Corpus:
    """Erdos-Renyi corpus with every ordered non-diagonal pair as a target."""
    rng = random.Random(seed)
    instances = []
    for _ in range(count):
        n = rng.randint(*n_range)
        p = rng.choice(edge_probs)
        g = erdos_renyi(n, p, seed=rng.randrange(2**31))
        for u in range(n):
            for v in range(n):
                if u != v:
                    instances.append((g, (u, v)))
    spec = {
        "generator": "erdos_renyi",
        "count": count,
        "seed": seed,
        "n_range": list(n_range),
        "edge_probs": list(edge_probs),
    }
    return Corpus(instances, spec)


def all_pairs_corpus(g: Graph) -> Corpus:
    instances = [
        (g, (u, v)) for u in range(g.n) for v in range(g.n) if u != v
    ]
    return Corpus(instances, {"generator": "all_pairs", "n": g.n, "m": g.m})


# ---------------------------------------------------------------------------
# Batch lockstep refinement: all instances of one kind refined together with
# a single interner, so colors are comparable corpus-wide. Sessions are
# deduplicated where targets provably cannot influence each other.
# ---------------------------------------------------------------------------


@dataclass
class BatchResult:
    kind: TestKind
    histories: list  # per instance: list over t of ordered key (a, b)
    iterations: int
    stable: bool

    def ordered_key(self, i: int, t: int):
        return self.histories[i][t]

    def link_key(self, i: int, t: int = -1):
        return tuple(sorted(self.histories[i][t]))

    def final_keys(self):
        return [tuple(sorted(h[-1])) for h in self.histories]

    def first_difference(self, i: int, j: int):
        hi, hj = self.histories[i], self.histories[j]
        for t in range(len(hi)):
            if tuple(sorted(hi[t])) != tuple(sorted(hj[t])):
                return t
        return None


def _canon_edge(g: Graph, pair):
    p, q = pair
    if g.has_edge(p, q):
        return (p, q) if p < q else (q, p)
    return None


def batch_refine(kind: TestKind, corpus: Corpus, max_iters: int = None) -> BatchResult:
    interner = Interner()
    sessions = {}
    session_targets = {}
    assignments = []  # per instance: (session key, target)

    for g, target in corpus.instances:
        p, q = target
        edge = _canon_edge(g, target)
        if kind in (TestKind.WL1, TestKind.WL2, TestKind.FWL2):
            key = (id(g), edge)
        elif kind is TestKind.WL2_LOCAL:
            key = (id(g), edge)
        else:  # WL1_Label01, FWL2_Local: labeling / tracking is target-specific
            key = (id(g), frozenset(target))
        if key not in sessions:
            sessions[key] = (g, edge, target)
            session_targets[key] = set()
        session_targets[key].add(target)
        assignments.append((key, target))

    built = {}
    for key, (g, edge, target) in sessions.items():
        if kind in (TestKind.WL1_LABEL01, TestKind.FWL2_LOCAL):
            built[key] = make_session(kind, g, mask=target, interner=interner)
        elif kind is TestKind.WL2_LOCAL:
            extras = sorted(session_targets[key])
            built[key] = make_session(
                kind, g, mask=edge, interner=interner, extra_targets=extras
            )
        else:
            built[key] = make_session(kind, g, mask=edge, interner=interner)

    if max_iters is None:
        max_iters = max(
            default_max_iters(kind, g) for g, _ in corpus.instances
        )

    histories = [[] for _ in corpus.instances]

    def record():
        for i, (key, target) in enumerate(assignments):
            histories[i].append(built[key].ordered_key(target))

    def state():
        colors = set()
        units = 0
        for s in built.values():
            colors.update(s.colors.values())
            units += s.num_units()
        return (len(colors), units)

    record()
    prev = state()
    stable = False
    iterations = 0
    for _ in range(max_iters):
        for s in built.values():
            s.step()
        iterations += 1
        record()
        cur = state()
        if cur == prev:
            stable = True
            break
        prev = cur
    return BatchResult(kind=kind, histories=histories, iterations=iterations, stable=stable)


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@dataclass
class Fixture:
    """A pair of (graph, target) instances with pinned per-test verdicts."""

    name: str
    graph_a: Graph
    target_a: tuple
    graph_b: Graph
    target_b: tuple
    expected: dict  # TestKind -> bool (distinguished?)
    note: str = ""

    def corpus(self) -> Corpus:
        return Corpus(
            [(self.graph_a, self.target_a), (self.graph_b, self.target_b)],
            {"generator": "fixture", "name": self.name},
        )


def _fixture_defs():
    c6 = cycle_graph(6)
    c3c3, _ = disjoint_union(cycle_graph(3), cycle_graph(3))
    k2 = complete_graph(2)
    k2k2, _ = disjoint_union(k2, k2)
    fixtures = [
        Fixture(
            name="F1-symmetric-endpoints",
            graph_a=c6,
            target_a=(0, 1),
            graph_b=c6,
            target_b=(0, 3),
            expected={},
            note="same ring, adjacent vs antipodal target",
        ),
        Fixture(
            name="F3-graph-size",
            graph_a=k2,
            target_a=(0, 1),
            graph_b=k2k2,
            target_b=(0, 1),
            expected={
                TestKind.WL1: False,
                TestKind.WL2_LOCAL: False,
                TestKind.WL2: True,
                TestKind.FWL2_LOCAL: False,
                TestKind.FWL2: True,
            },
            note="global pair tests see total graph size; node-local tests do not",
        ),
        Fixture(
            name="F4a-common-neighbor",
            graph_a=c6,
            target_a=(0, 2),
            graph_b=c3c3,
            target_b=(0, 3),
            expected={
                TestKind.WL1: False,
                TestKind.WL2_LOCAL: False,
                TestKind.WL2: False,
                TestKind.FWL2_LOCAL: True,
                TestKind.FWL2: True,
                TestKind.WL1_LABEL01: True,
            },
            note="distance-2 ring pair (one common neighbor) vs cross-ring pair",
        ),
        Fixture(
            name="F4b-antipodal-vs-cross",
            graph_a=c6,
            target_a=(0, 3),
            graph_b=c3c3,
            target_b=(0, 3),
            expected={
                TestKind.WL1_LABEL01: False,
                TestKind.FWL2_LOCAL: True,
                TestKind.FWL2: True,
            },
            note="0/1 marking cannot separate these; folklore pair tests can",
        ),
    ]
    return fixtures


def builtin_fixtures(include_magic_square: bool = True):
    """The pinned fixture families, plus the regular-grid pair if found."""
    fixtures = _fixture_defs()
    if include_magic_square:
        witness = magic_square_search()
        if witness is not None:
            g1, e1, g2, e2 = witness
            fixtures.append(
                Fixture(
                    name="F5-number-grid",
                    graph_a=g1,
                    target_a=e1,
                    graph_b=g2,
                    target_b=e2,
                    expected={TestKind.FWL2: False, TestKind.WL1_LABEL01: True},
                    note="regular 16-node grid graphs from number squares",
                )
            )
    return fixtures


def fixtures_corpus(fixtures=None) -> Corpus:
    if fixtures is None:
        fixtures = builtin_fixtures()
    instances = []
    for f in fixtures:
        instances.append((f.graph_a, f.target_a))
        instances.append((f.graph_b, f.target_b))
    return Corpus(instances, {"generator": "fixtures", "names": [f.name for f in fixtures]})


# ---------------------------------------------------------------------------
# Number-square search (16-node grid graphs)
# ---------------------------------------------------------------------------


def latin_squares_4():
    """All 4x4 latin squares over {0, 1, 2, 3} as flat 16-tuples."""
    squares = []
    perms = list(itertools.permutations(range(4)))

    def extend(rows):
        if len(rows) == 4:
            squares.append(tuple(x for row in rows for x in row))
            return
        for perm in perms:
            if all(perm[c] != row[c] for row in rows for c in range(4)):
                extend(rows + [perm])

    extend([])
    return squares


def number_grid_graph(square) -> Graph:
    """16 nodes (4x4 cells); edges join same row, same column, or same number."""
    edges = []
    for a in range(16):
        for b in range(a + 1, 16):
            ra, ca = divmod(a, 4)
            rb, cb = divmod(b, 4)
            if ra == rb or ca == cb or square[a] == square[b]:
                edges.append((a, b))
    return Graph.build(16, edges)


def _two_common_neighbors_everywhere(g: Graph) -> bool:
    sets = [set(ns) for ns in g.adj]
    for a in range(g.n):
        for b in range(a + 1, g.n):
            if len(sets[a] & sets[b]) != 2:
                return False
    return True


def magic_square_search(pool=None, max_candidates: int = 8):
    """Look for a pair of grid-graph links telling 0/1-marked 1-WL apart from 2-FWL.

    Filters the pool by the exactly-two-common-neighbors regularity predicate,
    then scans target pairs for a witness that the folklore pair test reports
    indistinguishable while marked node refinement distinguishes. Returns the
    first witness or None (absence is an outcome, not an error).
    """
    if pool is None:
        pool = latin_squares_4()
    survivors = []
    seen = set()
    for square in pool:
        g = number_grid_graph(square)
        if not _two_common_neighbors_everywhere(g):
            continue
        key = link_certificate(g, (0, 1), masked=False) if g.n <= 9 else None
        if key is not None and key in seen:
            continue
        if key is not None:
            seen.add(key)
        survivors.append(g)
        if len(survivors) >= max_candidates:
            break
    if not survivors:
        return None
    targets = [(p, q) for p in range(16) for q in range(p + 1, 16)]
    instances = []
    for gi, g in enumerate(survivors):
        for t in targets:
            instances.append((g, t))
    corpus = Corpus(instances, {"generator": "number_grid"})
    fwl2 = batch_refine(TestKind.FWL2, corpus)
    lab01 = batch_refine(TestKind.WL1_LABEL01, corpus)
    fwl2_keys = fwl2.final_keys()
    lab01_keys = lab01.final_keys()
    groups = {}
    for i, key in enumerate(fwl2_keys):
        groups.setdefault(key, []).append(i)
    for members in groups.values():
        for i, j in itertools.combinations(members, 2):
            if lab01_keys[i] != lab01_keys[j]:
                g1, e1 = corpus.instances[i]
                g2, e2 = corpus.instances[j]
                return (g1, e1, g2, e2)
    return None


# ---------------------------------------------------------------------------
# Power report
# ---------------------------------------------------------------------------

# Expected pattern of the power partial order over the five unlabeled tests.
EQUAL_POWER = ((TestKind.WL1, TestKind.WL2_LOCAL),)
STRICTLY_WEAKER = (
    (TestKind.WL1, TestKind.WL2),
    (TestKind.WL1, TestKind.FWL2_LOCAL),
    (TestKind.WL1, TestKind.FWL2),
    (TestKind.WL2_LOCAL, TestKind.WL2),
    (TestKind.WL2_LOCAL, TestKind.FWL2_LOCAL),
    (TestKind.WL2_LOCAL, TestKind.FWL2),
    (TestKind.WL2, TestKind.FWL2),
    (TestKind.FWL2_LOCAL, TestKind.FWL2),
)
INCOMPARABLE = ((TestKind.WL2, TestKind.FWL2_LOCAL),)


@dataclass
class PowerReport:
    corpus_spec: dict
    kinds: list
    num_instances: int
    implications: dict  # "A->B" -> {"holds": bool, "violations": int}
    witnesses: list  # strictness witnesses per ordered kind pair
    results: dict = field(repr=False, default=None)  # kind -> BatchResult

    @property
    def num_pairs(self) -> int:
        return self.num_instances * (self.num_instances - 1) // 2

    def implication_holds(self, a: TestKind, b: TestKind) -> bool:
        return self.implications[f"{a.value}->{b.value}"]["holds"]

    def has_witness(self, a: TestKind, b: TestKind) -> bool:
        return any(
            w["weaker"] == a.value and w["stronger"] == b.value for w in self.witnesses
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "corpus": self.corpus_spec,
                "num_instances": self.num_instances,
                "num_instance_pairs": self.num_pairs,
                "kinds": [k.value for k in self.kinds],
                "implications": self.implications,
                "witnesses": self.witnesses,
            },
            indent=2,
        )


def _implication_violations(keys_a, keys_b):
    """Pairs where A distinguishes (keys differ) but B does not (keys equal)."""
    groups = {}
    for i, kb in enumerate(keys_b):
        groups.setdefault(kb, []).append(i)
    violations = 0
    example = None
    for kb in sorted(groups, key=lambda k: groups[k][0]):
        members = groups[kb]
        if len(members) < 2:
            continue
        sub = {}
        for i in members:
            sub.setdefault(keys_a[i], []).append(i)
        if len(sub) < 2:
            continue
        total = len(members) * (len(members) - 1) // 2
        same_a = sum(len(v) * (len(v) - 1) // 2 for v in sub.values())
        violations += total - same_a
        if example is None:
            reps = sorted(v[0] for v in sub.values())
            example = (reps[0], reps[1])
    return violations, example


def _strictness_witness(keys_a, keys_b, result_b: BatchResult):
    """First pair distinguished by B but not by A, with B's iteration."""
    groups = {}
    for i, ka in enumerate(keys_a):
        groups.setdefault(ka, []).append(i)
    for ka in sorted(groups, key=lambda k: groups[k][0]):
        members = groups[ka]
        if len(members) < 2:
            continue
        by_b = {}
        for i in members:
            by_b.setdefault(keys_b[i], []).append(i)
        if len(by_b) < 2:
            continue
        reps = sorted(v[0] for v in by_b.values())
        i, j = reps[0], reps[1]
        return {"pair": (i, j), "iteration": result_b.first_difference(i, j)}
    return None


def power_check(corpus: Corpus, kinds=None, max_iters: int = None) -> PowerReport:
    """Pairwise distinguishability of every corpus instance pair, per test kind."""
    if not corpus.instances:
        raise ValueError("corpus is empty")
    if kinds is None:
        kinds = [k for k in ALL_KINDS if k is not TestKind.WL1_LABEL01]
    results = {k: batch_refine(k, corpus, max_iters=max_iters) for k in kinds}
    keys = {k: results[k].final_keys() for k in kinds}
    implications = {}
    witnesses = []
    for a in kinds:
        for b in kinds:
            if a is b:
                continue
            violations, example = _implication_violations(keys[a], keys[b])
            entry = {"holds": violations == 0, "violations": violations}
            if example is not None:
                entry["example"] = list(example)
            implications[f"{a.value}->{b.value}"] = entry
            wit = _strictness_witness(keys[a], keys[b], results[b])
            if wit is not None:
                witnesses.append(
                    {
                        "weaker": a.value,
                        "stronger": b.value,
                        "instances": list(wit["pair"]),
                        "iteration": wit["iteration"],
                    }
                )
    return PowerReport(
        corpus_spec=corpus.spec,
        kinds=list(kinds),
        num_instances=len(corpus.instances),
        implications=implications,
        witnesses=witnesses,
        results=results,
    )


def oracle_soundness(corpus: Corpus, results: dict, max_n: int = 7) -> dict:
    """No test may distinguish a pair the exhaustive oracle deems isomorphic.

    Groups small instances by their target-fixing canonical certificate
    (masked, matching engine semantics); within a group every kind's final
    link colors must coincide.
    """
    small = [
        i for i, (g, _) in enumerate(corpus.instances) if g.n <= max_n
    ]
    groups = {}
    for i in small:
        g, e = corpus.instances[i]
        cert = link_certificate(g, e, masked=True)
        groups.setdefault(cert, []).append(i)
    checked = 0
    violations = []
    final = {k: r.final_keys() for k, r in results.items()}
    for members in groups.values():
        checked += len(members) * (len(members) - 1) // 2
        if len(members) < 2:
            continue
        for kind, keys in final.items():
            ref = keys[members[0]]
            for i in members[1:]:
                if keys[i] != ref:
                    violations.append(
                        {"kind": kind.value, "instances": [members[0], i]}
                    )
    return {
        "instances": len(small),
        "checked": checked,
        "violations": len(violations),
        "details": violations[:10],
    }
