import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wl2link.generate import (
    complete_graph,
    cycle_graph,
    erdos_renyi,
    path_graph,
    star_graph,
)
from wl2link.graph import Graph, disjoint_union, permute
from wl2link.refine import (
    DEFAULT_DENSE_NODE_LIMIT,
    Interner,
    MemoryGateError,
    RefinementError,
    TestKind,
    cn_from_fwl2_signature,
    indistinguishable,
    init_colors,
    make_session,
    refine_step,
    refine_to_stable,
)

ALL = list(TestKind)


def brute_force_node_orbits(g):
    """Node partition under the full automorphism group (reference oracle)."""
    n = g.n
    autos = []
    for perm in itertools.permutations(range(n)):
        if any(g.labels[v] != g.labels[perm[v]] for v in range(n)):
            continue
        if all(g.has_edge(perm[u], perm[v]) for u, v in g.edges):
            autos.append(perm)
    orbits = []
    seen = set()
    for v in range(n):
        if v in seen:
            continue
        orbit = {perm[v] for perm in autos}
        seen |= orbit
        orbits.append(frozenset(orbit))
    return sorted(orbits)


class TestKindBasics:
    def test_parse_roundtrip(self):
        for kind in ALL:
            assert TestKind.parse(kind.value) is kind

    def test_parse_unknown(self):
        with pytest.raises(RefinementError, match="valid:"):
            TestKind.parse("WL3")

    def test_classification(self):
        assert not TestKind.WL1.pair_indexed
        assert not TestKind.WL1_LABEL01.pair_indexed
        assert TestKind.WL2.dense and TestKind.FWL2.dense
        assert not TestKind.WL2_LOCAL.dense and not TestKind.FWL2_LOCAL.dense


class TestInterner:
    def test_injective_and_dense(self):
        it = Interner()
        a = it.intern(("i", 0))
        b = it.intern(("i", 1))
        assert a == 0 and b == 1
        assert it.intern(("i", 0)) == a
        assert len(it) == 2


class TestInitColors:
    def test_wl1_by_label(self):
        g = Graph.build(3, [(0, 1)], labels=[5, 5, 7])
        cmap = init_colors(TestKind.WL1, g)
        assert cmap.colors[0] == cmap.colors[1] != cmap.colors[2]

    def test_fwl2_init_on_path_three_classes(self):
        # P3 pairs split into: diagonal, edge, non-edge (single label).
        cmap = init_colors(TestKind.FWL2, path_graph(3))
        classes = {}
        for pair, c in cmap.colors.items():
            classes.setdefault(c, set()).add(pair)
        assert len(classes) == 3
        by_kind = {frozenset(v) for v in classes.values()}
        assert frozenset({(0, 0), (1, 1), (2, 2)}) in by_kind
        assert frozenset({(0, 1), (1, 0), (1, 2), (2, 1)}) in by_kind
        assert frozenset({(0, 2), (2, 0)}) in by_kind

    def test_mask_zeroes_indicator(self):
        g = path_graph(3)
        it = Interner()
        masked = init_colors(TestKind.WL2, g, mask=(0, 1), interner=it)
        unmasked = init_colors(TestKind.WL2, g, interner=it)
        assert masked.colors[(0, 1)] != unmasked.colors[(0, 1)]
        assert masked.colors[(0, 1)] == unmasked.colors[(0, 2)]  # both non-edges now

    def test_local_tracks_edges_and_target(self):
        g = path_graph(4)
        cmap = init_colors(TestKind.WL2_LOCAL, g, mask=(0, 3))
        assert (0, 3) in cmap.colors and (3, 0) in cmap.colors
        assert (0, 1) in cmap.colors and (1, 0) in cmap.colors
        assert (0, 2) not in cmap.colors

    def test_label01_requires_mask(self):
        with pytest.raises(RefinementError):
            init_colors(TestKind.WL1_LABEL01, path_graph(3))

    def test_memory_gate(self):
        big = Graph.build(DEFAULT_DENSE_NODE_LIMIT + 1, [])
        with pytest.raises(MemoryGateError, match="dense node limit"):
            init_colors(TestKind.FWL2, big)
        # node-level and local kinds are not gated
        init_colors(TestKind.WL1, big)
        init_colors(TestKind.WL2_LOCAL, big)


class TestSessionStepping:
    def test_refine_step_carries_session(self):
        g = path_graph(4)
        it = Interner()
        cmap = init_colors(TestKind.WL1, g, interner=it)
        nxt = refine_step(TestKind.WL1, g, cmap, it)
        assert nxt.num_classes() >= cmap.num_classes()

    def test_refine_step_rejects_stale_map(self):
        g = path_graph(4)
        it = Interner()
        cmap = init_colors(TestKind.WL1, g, interner=it)
        refine_step(TestKind.WL1, g, cmap, it)
        with pytest.raises(RefinementError, match="stale"):
            refine_step(TestKind.WL1, g, cmap, it)

    def test_refine_step_rejects_wrong_interner(self):
        g = path_graph(4)
        it = Interner()
        cmap = init_colors(TestKind.WL1, g, interner=it)
        with pytest.raises(RefinementError, match="interner"):
            refine_step(TestKind.WL1, g, cmap, Interner())


class TestStablePartitions:
    def test_wl1_path4_orbits(self):
        g = path_graph(4)
        result = refine_to_stable(TestKind.WL1, g)
        assert result.final.partition() == brute_force_node_orbits(g)

    @pytest.mark.parametrize("seed", range(5))
    def test_wl1_matches_orbits_on_trees_and_sparse(self, seed):
        # 1-WL computes exact orbits on small random graphs most of the time;
        # it must always be at least as coarse (never split an orbit).
        g = erdos_renyi(6, 0.3, seed=seed)
        stable = refine_to_stable(TestKind.WL1, g).final
        for orbit in brute_force_node_orbits(g):
            colors = {stable.colors[v] for v in orbit}
            assert len(colors) == 1

    def test_monotone_class_counts(self):
        g = erdos_renyi(9, 0.4, seed=4)
        for kind in ALL:
            result = refine_to_stable(kind, g, mask=(0, 1))
            counts = [c.num_classes() for c in result.history]
            assert counts == sorted(counts)
            assert result.stable_at is not None
            assert not result.reached_cap

    def test_to_json_schema(self):
        import json

        result = refine_to_stable(TestKind.WL2, path_graph(3), mask=(0, 2))
        d = json.loads(result.to_json())
        assert d["test"] == "WL2"
        assert d["stable_at"] == result.stable_at
        rows = d["colors"]["0"]
        assert all(len(r) == 3 for r in rows)
        assert len(rows) == 9


class TestDistinguish:
    def test_wl2_sees_graph_size(self):
        k2 = complete_graph(2)
        k2k2, _ = disjoint_union(k2, k2)
        res = indistinguishable(TestKind.WL2, (0, 1), k2, (0, 1), k2k2)
        assert res.distinguished_at == 1

    def test_wl1_blind_to_graph_size(self):
        k2 = complete_graph(2)
        k2k2, _ = disjoint_union(k2, k2)
        res = indistinguishable(TestKind.WL1, (0, 1), k2, (0, 1), k2k2)
        assert not res.distinguished and res.stable

    def test_same_instance_indistinguishable(self):
        g = erdos_renyi(8, 0.4, seed=2)
        for kind in ALL:
            res = indistinguishable(kind, (1, 5), g, (1, 5), g)
            assert not res.distinguished

    def test_symmetric_orientation(self):
        g = erdos_renyi(8, 0.4, seed=2)
        for kind in ALL:
            res = indistinguishable(kind, (1, 5), g, (5, 1), g)
            assert not res.distinguished, kind

    def test_out_of_range(self):
        with pytest.raises(RefinementError):
            indistinguishable(TestKind.WL1, (0, 9), path_graph(3), (0, 1), path_graph(3))


class TestMaskingNoLeak:
    @pytest.mark.parametrize("kind", ALL)
    def test_target_color_independent_of_edge_presence(self, kind):
        # Adding or removing the target edge must not change any refinement
        # outcome when that pair is masked.
        base = erdos_renyi(8, 0.35, seed=6)
        target = (2, 5)
        with_edge = Graph.build(base.n, set(base.edges) | {target}, base.labels)
        without = with_edge.without_edge(*target)
        res = indistinguishable(kind, target, with_edge, target, without)
        assert not res.distinguished, kind


class TestEquivariance:
    @given(st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_permuted_instance_indistinguishable(self, seed):
        rng = random.Random(seed)
        n = rng.randint(4, 8)
        g = erdos_renyi(n, 0.4, seed=seed % 997)
        pi = list(range(n))
        rng.shuffle(pi)
        h = permute(g, pi)
        p, q = rng.sample(range(n), 2)
        kind = rng.choice(ALL)
        res = indistinguishable(kind, (p, q), g, (pi[p], pi[q]), h)
        assert not res.distinguished


class TestCnFromSignature:
    def test_triangle(self):
        tri = complete_graph(3)
        assert cn_from_fwl2_signature(tri, (0, 1)) == 1

    def test_star_leaves(self):
        assert cn_from_fwl2_signature(star_graph(4), (1, 2)) == 1

    def test_matches_direct_intersection(self):
        g = erdos_renyi(10, 0.4, seed=3)
        for p in range(g.n):
            for q in range(p + 1, g.n):
                direct = len(set(g.adj[p]) & set(g.adj[q]))
                assert cn_from_fwl2_signature(g, (p, q)) == direct

    def test_rejects_diagonal(self):
        with pytest.raises(RefinementError):
            cn_from_fwl2_signature(path_graph(3), (1, 1))


class TestSplitOnlyGuard:
    def test_merge_detected(self):
        session = make_session(TestKind.WL1, path_graph(3))
        session.step()  # colors now {0: a, 1: b, 2: a}
        a = session.colors[0]
        b = session.colors[1]
        assert a != b
        with pytest.raises(AssertionError, match="merged"):
            session._check_split_only({0: 99, 1: 99, 2: 99})
