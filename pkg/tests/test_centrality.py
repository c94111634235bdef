import numpy as np
import pytest

from airhold.centrality import (
    compute_all_edge_features,
    edge_betweenness,
    edge_connectivity,
    features_to_csv,
    flow_betweenness,
    google_matrix,
    max_flow,
    pagerank,
)
from airhold.errors import GraphError
from airhold.graph import AirportNode, WeightedDigraph, strengths
from conftest import make_graph, random_graph
from oracles import brute_edge_betweenness, brute_min_cut


class TestEdgeBetweenness:
    def test_path_graph(self):
        g = make_graph({("a", "b"): 1, ("b", "c"): 1})
        scores = edge_betweenness(g)
        assert scores == {("a", "b"): 2.0, ("b", "c"): 2.0}

    def test_single_edge(self):
        assert edge_betweenness(make_graph({("a", "b"): 1})) == {("a", "b"): 1.0}

    def test_bypassed_direct_edge(self):
        # direct a->b has length 1; a->c->b has length 0.1 + 0.1
        g = make_graph({("a", "b"): 1, ("a", "c"): 10, ("c", "b"): 10})
        scores = edge_betweenness(g)
        assert scores[("a", "b")] == 0.0

    def test_matches_oracle_on_random_graphs(self):
        rng = np.random.default_rng(7)
        for _ in range(60):
            g = random_graph(rng, int(rng.integers(2, 6)), p=0.5)
            if not g.weights:
                continue
            got = edge_betweenness(g)
            want = brute_edge_betweenness(g)
            for e in g.weights:
                assert got[e] == pytest.approx(want[e], abs=1e-9)

    def test_reversal_covariance(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            g = random_graph(rng, 5, p=0.5)
            if not g.weights:
                continue
            rev = make_graph({(v, u): w for (u, v), w in g.weights.items()})
            fwd_scores = edge_betweenness(g)
            rev_scores = edge_betweenness(rev)
            for (u, v), s in fwd_scores.items():
                assert rev_scores[(v, u)] == s

    def test_weight_scaling_invariance(self):
        rng = np.random.default_rng(3)
        g = random_graph(rng, 6, p=0.5)
        scaled = make_graph({e: w * 7 for e, w in g.weights.items()})
        assert edge_betweenness(g) == edge_betweenness(scaled)


class TestMaxFlow:
    def test_single_edge(self):
        g = make_graph({("a", "b"): 7})
        value, flows = max_flow(g, "a", "b")
        assert value == 7 and flows[("a", "b")] == 7

    def test_two_routes(self):
        g = make_graph({("a", "b"): 3, ("a", "c"): 2, ("c", "b"): 2})
        value, _ = max_flow(g, "a", "b")
        assert value == 5

    def test_no_path(self):
        g = make_graph({("a", "b"): 3, ("c", "b"): 1})
        value, flows = max_flow(g, "b", "c")
        assert value == 0 and all(f == 0 for f in flows.values())

    def test_errors(self):
        g = make_graph({("a", "b"): 1})
        with pytest.raises(GraphError):
            max_flow(g, "a", "a")
        with pytest.raises(GraphError):
            max_flow(g, "a", "zz")

    def test_min_cut_equality_and_feasibility(self):
        rng = np.random.default_rng(17)
        for _ in range(80):
            g = random_graph(rng, int(rng.integers(2, 7)), p=0.45)
            codes = g.node_codes
            s, t = rng.choice(codes, size=2, replace=False)
            value, flows = max_flow(g, s, t)
            assert value == brute_min_cut(g, s, t)
            for e, f in flows.items():
                assert 0 <= f <= g.weights[e]
            for v in codes:
                net = sum(f for (u, w), f in flows.items() if w == v) - sum(
                    f for (u, w), f in flows.items() if u == v
                )
                if v == s:
                    assert net == -value
                elif v == t:
                    assert net == value
                else:
                    assert net == 0

    def test_deterministic(self):
        g = make_graph({("a", "b"): 2, ("a", "c"): 2, ("c", "b"): 2, ("b", "d"): 3, ("c", "d"): 1})
        runs = [max_flow(g, "a", "d") for _ in range(3)]
        assert runs[0] == runs[1] == runs[2]


class TestFlowBetweenness:
    def test_single_edge(self):
        assert flow_betweenness(make_graph({("a", "b"): 7})) == {("a", "b"): 1.0}

    def test_path_graph(self):
        scores = flow_betweenness(make_graph({("a", "b"): 1, ("b", "c"): 1}))
        assert scores[("a", "b")] == pytest.approx(2 / 3)
        assert scores[("b", "c")] == pytest.approx(2 / 3)

    def test_unused_edge_zero(self):
        # c->a carries no flow for any pair reachable through it
        g = make_graph({("a", "b"): 1})
        scores = flow_betweenness(g)
        assert all(v >= 0 for v in scores.values())
        assert set(scores) == set(g.weights)

    def test_matches_per_pair_oracle(self):
        rng = np.random.default_rng(23)
        for _ in range(15):
            g = random_graph(rng, 4, p=0.6)
            if not g.weights:
                continue
            total = 0
            sums = {e: 0 for e in g.weights}
            for s in g.node_codes:
                for t in g.node_codes:
                    if s == t:
                        continue
                    value, flows = max_flow(g, s, t)
                    total += value
                    for e, f in flows.items():
                        sums[e] += f
            expected = {e: sums[e] / max(1, total) for e in g.weights}
            assert flow_betweenness(g) == expected


class TestEdgeConnectivity:
    def test_single_edge(self):
        assert edge_connectivity(make_graph({("a", "b"): 4}), "a", "b") == 4.0

    def test_two_routes(self):
        g = make_graph({("a", "b"): 3, ("a", "c"): 2, ("c", "b"): 2})
        assert edge_connectivity(g, "a", "b") == 5.0

    def test_nonexistent_edge(self):
        with pytest.raises(GraphError):
            edge_connectivity(make_graph({("a", "b"): 1}), "b", "a")

    def test_trivial_cut_bound(self):
        rng = np.random.default_rng(29)
        for _ in range(20):
            g = random_graph(rng, 5, p=0.5)
            for (u, v) in g.weights:
                lam = edge_connectivity(g, u, v)
                assert lam <= min(strengths(g, u)[1], strengths(g, v)[0])


class TestGoogleMatrix:
    def test_two_node_single_edge(self):
        gm = google_matrix(make_graph({("a", "b"): 1}))
        assert gm.entry("a", "b") == pytest.approx(0.925, abs=1e-15)

    def test_dangling_row_uniform(self):
        gm = google_matrix(make_graph({("a", "b"): 1, ("a", "c"): 1}))
        i = gm.node_order.index("b")
        assert np.allclose(gm.rows[i], 1.0 / 3)

    def test_hand_evaluated_entry(self):
        gm = google_matrix(make_graph({("a", "b"): 1, ("a", "c"): 3}))
        assert gm.entry("a", "c") == pytest.approx(0.05 + 0.85 * 0.75, abs=1e-15)

    def test_rows_stochastic_and_floor(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            g = random_graph(rng, int(rng.integers(2, 8)), p=0.4)
            gm = google_matrix(g)
            n = len(gm.node_order)
            assert np.all(np.abs(gm.rows.sum(axis=1) - 1.0) <= 1e-12)
            assert np.all(gm.rows >= (1 - 0.85) / n - 1e-15)

    def test_empty_graph(self):
        with pytest.raises(GraphError):
            google_matrix(WeightedDigraph([], {}))


class TestPageRank:
    def test_symmetric_two_cycle(self):
        p = pagerank(make_graph({("a", "b"): 1, ("b", "a"): 1}))
        assert p["a"] == pytest.approx(0.5, abs=1e-12)
        assert p["b"] == pytest.approx(0.5, abs=1e-12)

    def test_three_cycle_uniform(self):
        p = pagerank(make_graph({("a", "b"): 1, ("b", "c"): 1, ("c", "a"): 1}))
        for v in "abc":
            assert p[v] == pytest.approx(1 / 3, abs=1e-12)

    def test_sums_to_one_and_residual(self):
        rng = np.random.default_rng(37)
        for _ in range(10):
            g = random_graph(rng, 7, p=0.4)
            scores = pagerank(g, tol=1e-10)
            assert sum(scores.values()) == pytest.approx(1.0, abs=1e-12)
            gm = google_matrix(g)
            p = np.array([scores[c] for c in gm.node_order])
            assert np.abs(p @ gm.rows - p).sum() <= 1e-10


class TestFeatureAssembly:
    def test_single_edge_graph(self):
        feats = compute_all_edge_features(make_graph({("a", "b"): 1}))
        f = feats[("a", "b")]
        assert f.betweenness == 1.0
        assert f.flow_betweenness == 1.0
        assert f.edge_connectivity == 1.0
        assert (f.degree_diff_src, f.degree_diff_dst) == (-1, 1)
        assert f.google_entry == pytest.approx(0.925, abs=1e-15)

    def test_keys_match_weights(self):
        rng = np.random.default_rng(41)
        g = random_graph(rng, 6, p=0.5)
        feats = compute_all_edge_features(g)
        assert set(feats) == set(g.weights)

    def test_consistent_with_kernels(self):
        rng = np.random.default_rng(43)
        g = random_graph(rng, 5, p=0.6)
        feats = compute_all_edge_features(g)
        bet = edge_betweenness(g)
        fbet = flow_betweenness(g)
        gm = google_matrix(g)
        for (u, v), f in feats.items():
            assert f.betweenness == bet[(u, v)]
            assert f.flow_betweenness == fbet[(u, v)]
            assert f.edge_connectivity == edge_connectivity(g, u, v)
            assert f.google_entry == gm.entry(u, v)

    def test_csv_dump_sorted(self):
        g = make_graph({("b", "a"): 2, ("a", "b"): 1})
        text = features_to_csv(g, compute_all_edge_features(g))
        lines = text.strip().split("\n")
        assert lines[0].startswith("src,dst,weight,betweenness")
        assert lines[1].startswith("a,b,1,") and lines[2].startswith("b,a,2,")
