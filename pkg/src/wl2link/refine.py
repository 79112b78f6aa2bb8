"""Color refinement for node-level and node-pair-level WL-style tests.

Six tests share one machinery: classic node refinement (plain and with the
two target nodes marked), refinement over all ordered node pairs (plain and
folklore aggregation), and the sparse local variants whose neighborhoods are
restricted to observed edges.

Masked-target semantics: when a pair is the prediction target, its edge (if
present) is removed from the working edge set before refinement, so neither
the pair's own indicator nor any neighborhood can leak whether the link
exists.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from .graph import Graph, GraphError, label01


class RefinementError(ValueError):
    pass


class MemoryGateError(RefinementError):
    """Raised when a dense pair test is requested on a graph above the node cap."""


class TestKind(enum.Enum):
    WL1 = "WL1"
    WL1_LABEL01 = "WL1_Label01"
    WL2 = "WL2"
    FWL2 = "FWL2"
    WL2_LOCAL = "WL2_Local"
    FWL2_LOCAL = "FWL2_Local"

    @property
    def pair_indexed(self) -> bool:
        return self not in (TestKind.WL1, TestKind.WL1_LABEL01)

    @property
    def dense(self) -> bool:
        return self in (TestKind.WL2, TestKind.FWL2)

    @staticmethod
    def parse(name: str) -> "TestKind":
        for kind in TestKind:
            if kind.value == name:
                return kind
        valid = ", ".join(k.value for k in TestKind)
        raise RefinementError(f"unknown test kind {name!r}; valid: {valid}")


ALL_KINDS = tuple(TestKind)

# Reserved color for pairs a sparse folklore session does not track yet.
# Never handed out by an interner.
ABSENT = -1

# Dense pair tests allocate n^2 state; refuse beyond this node count.
DEFAULT_DENSE_NODE_LIMIT = 128


class Interner:
    """Injective signature -> dense color id table (exact, no lossy hashing)."""

    def __init__(self):
        self.table = {}
        self.signatures = []

    def intern(self, sig) -> int:
        cid = self.table.get(sig)
        if cid is None:
            cid = len(self.signatures)
            self.table[sig] = cid
            self.signatures.append(sig)
        return cid

    def __len__(self) -> int:
        return len(self.signatures)


@dataclass
class ColorMap:
    """Colors for one iteration; unit keys are node ids or ordered pairs."""

    colors: dict
    pair_indexed: bool
    session: "RefinementSession" = field(repr=False, compare=False, default=None)

    def num_classes(self) -> int:
        return len(set(self.colors.values()))

    def partition(self):
        classes = {}
        for unit, c in self.colors.items():
            classes.setdefault(c, []).append(unit)
        return sorted(frozenset(v) for v in classes.values())


def _init_pair_sig(labels, eff: Graph, r: int, s: int):
    e_ind = 1 if r != s and eff.has_edge(r, s) else 0
    return ("i", labels[r], labels[s], e_ind, 1 if r == s else 0)


class RefinementSession:
    """One refinement run: a graph, a test kind, an optional masked target.

    Sessions sharing an Interner produce comparable colors because every
    signature is purely structural. A session is single-threaded; distinct
    sessions over shared graphs may run in parallel.
    """

    def __init__(
        self,
        kind: TestKind,
        graph: Graph,
        mask=None,
        interner: Interner = None,
        extra_targets=(),
        dense_node_limit: int = DEFAULT_DENSE_NODE_LIMIT,
    ):
        if mask is not None:
            p, q = mask
            if not (0 <= p < graph.n and 0 <= q < graph.n):
                raise RefinementError(f"mask ({p}, {q}) out of range")
            if p == q:
                raise RefinementError("mask nodes must be distinct")
        if kind.dense and graph.n > dense_node_limit:
            raise MemoryGateError(
                f"{kind.value} needs n^2 state; n={graph.n} exceeds the "
                f"dense node limit {dense_node_limit}"
            )
        if kind is TestKind.WL1_LABEL01 and mask is None:
            raise RefinementError("WL1_Label01 requires a target pair")
        if extra_targets and kind is not TestKind.WL2_LOCAL:
            raise RefinementError("extra targets only supported for WL2_Local")

        self.kind = kind
        self.graph = graph
        self._extra_targets = tuple(extra_targets)
        self.mask = tuple(mask) if mask is not None else None
        self.interner = interner if interner is not None else Interner()
        self.eff = graph.without_edge(*mask) if mask is not None else graph
        if kind is TestKind.WL1_LABEL01:
            self.labels = label01(self.eff, mask).labels
        else:
            self.labels = self.eff.labels
        self.iteration = 0
        self.colors = {}
        self._init_colors()

    # -- initialization ---------------------------------------------------

    def _init_colors(self):
        kind, eff, intern = self.kind, self.eff, self.interner.intern
        labels = self.labels
        if not kind.pair_indexed:
            self.colors = {v: intern(("i", labels[v])) for v in range(eff.n)}
            return
        if kind.dense:
            n = eff.n
            self.colors = {
                (p, q): intern(_init_pair_sig(labels, eff, p, q))
                for p in range(n)
                for q in range(n)
            }
            return
        tracked = set()
        for u, v in eff.edges:
            tracked.add((u, v))
            tracked.add((v, u))
        targets = [self.mask] if self.mask is not None else []
        targets.extend(self.extra_targets_init())
        for p, q in targets:
            tracked.add((p, q))
            tracked.add((q, p))
        self.colors = {
            pair: intern(_init_pair_sig(labels, eff, *pair)) for pair in tracked
        }

    def extra_targets_init(self):
        return getattr(self, "_extra_targets", ())

    # -- stepping ---------------------------------------------------------

    def step(self, expand: bool = True) -> dict:
        """Advance one iteration; returns the new color map.

        ``expand`` controls sparse-tracking growth for the local folklore
        test (newly reachable pairs); other kinds ignore it.
        """
        kind = self.kind
        if kind.pair_indexed:
            if kind is TestKind.WL2:
                new = self._step_wl2()
            elif kind is TestKind.FWL2:
                new = self._step_fwl2()
            elif kind is TestKind.WL2_LOCAL:
                new = self._step_wl2_local()
            else:
                new = self._step_fwl2_local(expand)
        else:
            new = self._step_wl1()
        self._check_split_only(new)
        self.colors = new
        self.iteration += 1
        return new

    def _step_wl1(self):
        c, intern, adj = self.colors, self.interner.intern, self.eff.adj
        return {
            v: intern(("s", c[v], tuple(sorted(c[u] for u in adj[v]))))
            for v in c
        }

    def _step_wl2(self):
        n, c, intern = self.eff.n, self.colors, self.interner.intern
        cols = [tuple(sorted(c[(u, q)] for u in range(n))) for q in range(n)]
        rows = [tuple(sorted(c[(p, v)] for v in range(n))) for p in range(n)]
        return {
            (p, q): intern(("s", c[(p, q)], cols[q], rows[p]))
            for p in range(n)
            for q in range(n)
        }

    def _step_fwl2(self):
        n, c, intern = self.eff.n, self.colors, self.interner.intern
        rng = range(n)
        return {
            (p, q): intern(
                ("s", c[(p, q)], tuple(sorted((c[(u, q)], c[(p, u)]) for u in rng)))
            )
            for p in rng
            for q in rng
        }

    def _step_wl2_local(self):
        c, intern, adj = self.colors, self.interner.intern, self.eff.adj
        in_col = {}
        out_row = {}
        new = {}
        for p, q in c:
            b1 = in_col.get(q)
            if b1 is None:
                b1 = in_col[q] = tuple(sorted(c[(u, q)] for u in adj[q]))
            b2 = out_row.get(p)
            if b2 is None:
                b2 = out_row[p] = tuple(sorted(c[(p, v)] for v in adj[p]))
            new[(p, q)] = intern(("s", c[(p, q)], b1, b2))
        return new

    def _fwl2_local_sig(self, prev, p, q):
        c, adj = self.colors, self.eff.adj
        get = c.get
        entries = sorted(
            (get((u, q), ABSENT), get((p, u), ABSENT))
            for u in set(adj[p]).union(adj[q])
        )
        return ("s", prev, tuple(entries))

    def _step_fwl2_local(self, expand: bool):
        c, intern = self.colors, self.interner.intern
        new = {pair: intern(self._fwl2_local_sig(c[pair], *pair)) for pair in c}
        if expand:
            adj, labels, eff = self.eff.adj, self.labels, self.eff
            candidates = set()
            for p, u in c:
                for q in adj[u]:
                    if (p, q) not in c:
                        candidates.add((p, q))
                # walk extension on the left: x - p where {x, p} in E
                for x in adj[p]:
                    if (x, u) not in c:
                        candidates.add((x, u))
            for pair in candidates:
                virtual_prev = intern(_init_pair_sig(labels, eff, *pair))
                new[pair] = intern(self._fwl2_local_sig(virtual_prev, *pair))
        return new

    def _check_split_only(self, new):
        # Refinement invariant: classes split, never merge. Each new color
        # must originate from exactly one old color.
        origin = {}
        for unit, old in self.colors.items():
            cur = new[unit]
            prev = origin.setdefault(cur, old)
            assert prev == old, "refinement merged two color classes"

    # -- readout ----------------------------------------------------------

    def ordered_key(self, pair):
        p, q = pair
        if self.kind.pair_indexed:
            return (self.colors[(p, q)], self.colors[(q, p)])
        return (self.colors[p], self.colors[q])

    def link_key(self, pair):
        """Undirected link color: the multiset over both orientations."""
        return tuple(sorted(self.ordered_key(pair)))

    def num_units(self) -> int:
        return len(self.colors)

    def num_classes(self) -> int:
        return len(set(self.colors.values()))


def make_session(kind, graph, mask=None, interner=None, extra_targets=(), **kw):
    return RefinementSession(
        kind, graph, mask=mask, interner=interner,
        extra_targets=tuple(extra_targets), **kw
    )


def default_max_iters(kind: TestKind, g: Graph) -> int:
    return (g.n * g.n + 2) if kind.pair_indexed else (g.n + 2)


@dataclass
class RefinementResult:
    kind: TestKind
    mask: tuple
    history: list  # ColorMap per iteration, t = 0..T
    stable_at: int  # first t with partition unchanged; None if cap reached
    reached_cap: bool
    interner: Interner

    @property
    def final(self) -> ColorMap:
        return self.history[-1]

    def to_json(self) -> str:
        colors = {}
        for t, cmap in enumerate(self.history):
            if cmap.pair_indexed:
                rows = sorted([p, q, c] for (p, q), c in cmap.colors.items())
            else:
                rows = sorted([v, c] for v, c in cmap.colors.items())
            colors[str(t)] = rows
        return json.dumps(
            {
                "test": self.kind.value,
                "stable_at": self.stable_at,
                "reached_cap": self.reached_cap,
                "mask": list(self.mask) if self.mask else None,
                "colors": colors,
            }
        )


def init_colors(kind: TestKind, g: Graph, mask=None, interner: Interner = None) -> ColorMap:
    session = make_session(kind, g, mask=mask, interner=interner)
    return ColorMap(dict(session.colors), kind.pair_indexed, session)


def refine_step(kind: TestKind, g: Graph, colors: ColorMap, interner: Interner) -> ColorMap:
    session = colors.session
    if session is None or session.kind is not kind or session.graph is not g:
        raise RefinementError("color map does not belong to this (kind, graph) session")
    if interner is not session.interner:
        raise RefinementError("interner session mismatch")
    if colors.colors != session.colors:
        raise RefinementError("stale color map: session has already advanced")
    new = session.step()
    return ColorMap(dict(new), kind.pair_indexed, session)


def refine_to_stable(
    kind: TestKind,
    g: Graph,
    mask=None,
    max_iters: int = None,
    interner: Interner = None,
    extra_targets=(),
    dense_node_limit: int = DEFAULT_DENSE_NODE_LIMIT,
) -> RefinementResult:
    """Iterate until the induced partition stops splitting (or cap reached)."""
    if max_iters is not None and max_iters < 1:
        raise RefinementError("max_iters must be >= 1")
    if max_iters is None:
        max_iters = default_max_iters(kind, g)
    session = make_session(
        kind, g, mask=mask, interner=interner, extra_targets=extra_targets,
        dense_node_limit=dense_node_limit,
    )
    history = [ColorMap(dict(session.colors), kind.pair_indexed, session)]
    stable_at = None
    prev_classes, prev_units = session.num_classes(), session.num_units()
    for t in range(1, max_iters + 1):
        session.step()
        history.append(ColorMap(dict(session.colors), kind.pair_indexed, session))
        classes, units = session.num_classes(), session.num_units()
        if classes == prev_classes and units == prev_units:
            stable_at = t
            break
        prev_classes, prev_units = classes, units
    if stable_at is not None:
        assert stable_at <= session.num_units() + 1, "stabilization bound violated"
    return RefinementResult(
        kind=kind,
        mask=session.mask,
        history=history,
        stable_at=stable_at,
        reached_cap=stable_at is None,
        interner=session.interner,
    )


@dataclass
class DistinguishResult:
    distinguished_at: int  # iteration of first difference, or None
    iterations: int  # iterations actually run
    stable: bool

    @property
    def distinguished(self) -> bool:
        return self.distinguished_at is not None


def indistinguishable(
    kind: TestKind,
    e1,
    g1: Graph,
    e2,
    g2: Graph,
    max_iters: int = None,
) -> DistinguishResult:
    """Run both instances in lockstep with one shared interner.

    Compares the undirected link color (multiset over both orientations of
    the target; pair of node colors for node-level tests) at every
    iteration. Masking applies to e1 in g1 and e2 in g2.
    """
    for e, g in ((e1, g1), (e2, g2)):
        p, q = e
        if not (0 <= p < g.n and 0 <= q < g.n):
            raise RefinementError(f"target ({p}, {q}) out of range")
    if max_iters is None:
        max_iters = max(default_max_iters(kind, g1), default_max_iters(kind, g2))
    interner = Interner()
    s1 = make_session(kind, g1, mask=e1, interner=interner)
    s2 = make_session(kind, g2, mask=e2, interner=interner)
    if s1.link_key(e1) != s2.link_key(e2):
        return DistinguishResult(0, 0, False)
    prev = (
        len({*s1.colors.values(), *s2.colors.values()}),
        s1.num_units() + s2.num_units(),
    )
    for t in range(1, max_iters + 1):
        s1.step()
        s2.step()
        if s1.link_key(e1) != s2.link_key(e2):
            return DistinguishResult(t, t, False)
        cur = (
            len({*s1.colors.values(), *s2.colors.values()}),
            s1.num_units() + s2.num_units(),
        )
        if cur == prev:
            return DistinguishResult(None, t, True)
        prev = cur
    return DistinguishResult(None, max_iters, False)


def cn_from_fwl2_signature(g: Graph, target) -> int:
    """Common-neighbor count read off the first folklore pair iteration.

    With the target masked, entry u of the target's multiset carries the
    edge indicators of (u, q) and (p, u); counting the (1, 1) entries yields
    |N(p) ∩ N(q)|.
    """
    p, q = target
    if p == q:
        raise RefinementError("target nodes must be distinct")
    eff = g.without_edge(p, q)
    labels = eff.labels
    count = 0
    for u in range(eff.n):
        sig_uq = _init_pair_sig(labels, eff, u, q)
        sig_pu = _init_pair_sig(labels, eff, p, u)
        if sig_uq[3] == 1 and sig_pu[3] == 1:
            count += 1
    return count
