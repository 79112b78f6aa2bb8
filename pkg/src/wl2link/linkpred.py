"""Link prediction: classical heuristics, refinement-color features, AUC."""

from __future__ import annotations

import json
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, GraphError, sample_non_edges, split_links
from .refine import (
    ABSENT,
    Interner,
    TestKind,
    cn_from_fwl2_signature,
    make_session,
    refine_to_stable,
)


class LinkPredError(ValueError):
    pass


# -- classical heuristics ----------------------------------------------------


def _common_neighbors(g: Graph, p: int, q: int):
    if p == q:
        raise LinkPredError("heuristics require two distinct nodes")
    return set(g.adj[p]) & set(g.adj[q])


def heuristic_cn(g: Graph, p: int, q: int) -> int:
    """|N(p) ∩ N(q)|. The caller excludes the pair's own edge beforehand."""
    return len(_common_neighbors(g, p, q))


def heuristic_pa(g: Graph, p: int, q: int) -> int:
    """deg(p) * deg(q)."""
    if p == q:
        raise LinkPredError("heuristics require two distinct nodes")
    return g.degree(p) * g.degree(q)


def heuristic_ra(g: Graph, p: int, q: int) -> float:
    """Sum of 1/deg(u) over common neighbors u."""
    return sum(1.0 / g.degree(u) for u in _common_neighbors(g, p, q))


# -- color features ----------------------------------------------------------

# Colors are canonicalized into this process-wide interner before ranking,
# so histogram bucketing is invariant under graph isomorphism (raw session
# ids depend on unit enumeration order, which is not).
_canon = Interner()
_canon_lock = threading.Lock()


def _canonical_color_ids(session):
    sigs = session.interner.signatures
    intern = _canon.intern
    memo = {}

    def crank(c):
        if c == ABSENT:
            return intern(("absent",))
        r = memo.get(c)
        if r is None:
            memo[c] = r = intern(expand(sigs[c]))
        return r

    def expand(sig):
        if sig[0] == "i":
            return sig
        if sig[0] != "s":
            raise AssertionError(f"unknown signature tag {sig[0]!r}")
        prev = crank(sig[1])
        branches = []
        for branch in sig[2:]:
            if branch and isinstance(branch[0], tuple):
                branches.append(
                    tuple(sorted((crank(a), crank(b)) for a, b in branch))
                )
            else:
                branches.append(tuple(sorted(crank(c) for c in branch)))
        return ("s", prev, *branches)

    with _canon_lock:
        return {c: crank(c) for c in set(session.colors.values())}


def _color_ranks(session):
    """Rank distinct final colors by class size, then canonical form."""
    sizes = {}
    for c in session.colors.values():
        sizes[c] = sizes.get(c, 0) + 1
    canon = _canonical_color_ids(session)
    ordered = sorted(sizes, key=lambda c: (sizes[c], canon[c]))
    return {c: r for r, c in enumerate(ordered)}


HEURISTIC_NAMES = ("cn", "pa", "ra", "ee")


def featurize(
    kind: TestKind,
    g_train: Graph,
    target,
    width: int = 8,
    max_iters: int = None,
) -> np.ndarray:
    """Feature vector [cn, pa, ra, ee, hist_0..hist_{width-1}] for a target.

    The target is always masked. Heuristics are populated for pair-indexed
    kinds and zero-filled for node-level kinds (whose point is to measure
    what refinement alone sees). ``ee`` counts the first-iteration
    (edge, edge) aggregation entries, nonzero only for folklore kinds.
    The histogram buckets the final colors of the units incident to the
    target (pairs touching p or q; nodes adjacent to p or q) by canonical
    color rank modulo width.
    """
    if width < 1:
        raise LinkPredError("width must be >= 1")
    p, q = target
    if kind is TestKind.FWL2_LOCAL:
        # One sharpening step over the observed pairs; expansion to longer
        # walks is not needed for target-incident readout.
        session = make_session(kind, g_train, mask=target)
        for _ in range(1 if max_iters is None else max_iters):
            session.step(expand=False)
    else:
        result = refine_to_stable(kind, g_train, mask=target, max_iters=max_iters)
        session = result.final.session
    eff = session.eff
    if kind.pair_indexed:
        cn = float(heuristic_cn(eff, p, q))
        pa = float(heuristic_pa(eff, p, q))
        ra = heuristic_ra(eff, p, q)
    else:
        cn = pa = ra = 0.0
    if kind in (TestKind.FWL2, TestKind.FWL2_LOCAL):
        ee = float(cn_from_fwl2_signature(g_train, target))
    else:
        ee = 0.0
    if kind.pair_indexed:
        units = [u for u in session.colors if u[0] in (p, q) or u[1] in (p, q)]
    else:
        units = sorted(set(eff.adj[p]) | set(eff.adj[q]))
    hist = [0.0] * width
    ranks = _color_ranks(session)
    for u in units:
        hist[ranks[session.colors[u]] % width] += 1.0
    # Relative frequencies: the histogram encodes color composition only.
    # Raw counts would re-encode |N(p) ∪ N(q)|, i.e. degree information that
    # belongs to the PA heuristic, not to the refinement colors.
    total = sum(hist)
    if total > 0:
        hist = [h / total for h in hist]
    return np.array([cn, pa, ra, ee] + hist)


# -- linear scorer -----------------------------------------------------------


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 500
    seed: int = 0


@dataclass
class LinearScorer:
    weights: np.ndarray
    bias: float
    mean: np.ndarray
    std: np.ndarray
    config: TrainConfig
    loss_history: list = field(repr=False, default_factory=list)

    def score(self, features: np.ndarray) -> np.ndarray:
        x = (np.atleast_2d(features) - self.mean) / self.std
        return x @ self.weights + self.bias

    def score_one(self, features) -> float:
        return float(self.score(features)[0])


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def train_scorer(features, labels, config: TrainConfig = None) -> LinearScorer:
    """Logistic regression by full-batch gradient descent from zero init."""
    if config is None:
        config = TrainConfig()
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    if x.ndim != 2 or len(x) != len(y) or len(y) < 2:
        raise LinkPredError("need >= 2 feature rows matching the labels")
    if not np.isfinite(x).all():
        raise LinkPredError("non-finite feature values")
    if len(set(y.tolist())) < 2:
        raise LinkPredError("training labels contain a single class")
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std[std == 0.0] = 1.0
    xs = (x - mean) / std
    w = np.zeros(x.shape[1])
    b = 0.0
    n = len(y)
    losses = []
    for _ in range(config.epochs):
        z = xs @ w + b
        pred = _sigmoid(z)
        eps = 1e-12
        losses.append(
            float(-np.mean(y * np.log(pred + eps) + (1 - y) * np.log(1 - pred + eps)))
        )
        grad = pred - y
        w -= config.learning_rate * (xs.T @ grad) / n
        b -= config.learning_rate * float(grad.mean())
    return LinearScorer(
        weights=w, bias=b, mean=mean, std=std, config=config, loss_history=losses
    )


# -- evaluation --------------------------------------------------------------


def auc(scores, labels) -> float:
    """Exact rank-statistic AUC: P(pos > neg) + half the tie probability."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise LinkPredError("AUC needs both classes")
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(len(s))
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and s[order[j + 1]] == s[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    pos_rank_sum = float(ranks[y == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass
class BenchmarkReport:
    dataset: str
    kind: TestKind
    split_seed: int
    val_auc: float
    test_auc: float
    featurize_seconds: float
    n: int
    m: int
    isolated_nodes: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "dataset": self.dataset,
                "kind": self.kind.value,
                "split_seed": self.split_seed,
                "val_auc": self.val_auc,
                "test_auc": self.test_auc,
                "featurize_seconds": self.featurize_seconds,
                "n": self.n,
                "m": self.m,
                "isolated_nodes": self.isolated_nodes,
            }
        )


def benchmark(
    g: Graph,
    kind: TestKind,
    split_seed: int,
    train_config: TrainConfig = None,
    width: int = 8,
    dataset: str = "custom",
    workers: int = 1,
) -> BenchmarkReport:
    """10%/5% held-out split, self-masked training features, val/test AUC.

    Train positives are the remaining train edges, each masked during its
    own featurization; train negatives are an equal number of sampled
    non-edges of the original graph, disjoint from the held-out negatives.
    All features are computed on the train graph only.
    """
    split = split_links(g, 0.10, 0.05, split_seed)
    train = split.train_graph
    train_pos = train.edge_list()
    rng = random.Random(split_seed + 1)
    held_negs = set(split.val_neg) | set(split.test_neg)
    train_neg = sample_non_edges(g, len(train_pos), rng, forbidden=held_negs)

    elapsed = 0.0

    def feats(pairs):
        nonlocal elapsed
        t0 = time.perf_counter()
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(
                    pool.map(lambda e: featurize(kind, train, e, width=width), pairs)
                )
        else:
            rows = [featurize(kind, train, e, width=width) for e in pairs]
        elapsed += time.perf_counter() - t0
        return np.array(rows)

    x_train = np.vstack([feats(train_pos), feats(train_neg)])
    y_train = np.array([1] * len(train_pos) + [0] * len(train_neg))
    scorer = train_scorer(x_train, y_train, train_config)

    def eval_auc(pos, neg):
        x = np.vstack([feats(pos), feats(neg)])
        y = np.array([1] * len(pos) + [0] * len(neg))
        return auc(scorer.score(x), y)

    val_auc = eval_auc(split.val_pos, split.val_neg)
    test_auc = eval_auc(split.test_pos, split.test_neg)
    return BenchmarkReport(
        dataset=dataset,
        kind=kind,
        split_seed=split_seed,
        val_auc=val_auc,
        test_auc=test_auc,
        featurize_seconds=elapsed,
        n=g.n,
        m=g.m,
        isolated_nodes=sum(1 for v in range(train.n) if train.degree(v) == 0),
    )
