import json
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from airhold.errors import GraphError
from airhold.graph import (
    AirportNode,
    FlightEdge,
    FlightMultigraph,
    WeightedDigraph,
    collapse_multigraph,
    distance_transform,
    graph_from_json,
    graph_to_json,
    is_strongly_connected,
    strengths,
)
from conftest import make_graph


def mg_from_pairs(pairs):
    codes = sorted({c for e in pairs for c in e})
    nodes = [AirportNode(c, 0.0, float(i), 0.0) for i, c in enumerate(codes)]
    edges = [FlightEdge(i, u, v, i) for i, (u, v) in enumerate(pairs)]
    return FlightMultigraph(nodes, edges)


class TestTypes:
    def test_airport_ranges(self):
        with pytest.raises(GraphError):
            AirportNode("XX", 91.0, 0.0, 0.0)
        with pytest.raises(GraphError):
            AirportNode("XX", 0.0, -181.0, 0.0)
        with pytest.raises(GraphError):
            AirportNode("XX", 0.0, 0.0, -500.0)

    def test_flight_self_loop_rejected(self):
        with pytest.raises(GraphError):
            FlightEdge(0, "SP", "SP", 0)

    def test_duplicate_edge_ids_rejected(self):
        nodes = [AirportNode("a", 0, 0, 0), AirportNode("b", 0, 1, 0)]
        with pytest.raises(GraphError):
            FlightMultigraph(nodes, [FlightEdge(1, "a", "b", 0), FlightEdge(1, "a", "b", 1)])

    def test_unknown_endpoint_rejected(self):
        nodes = [AirportNode("a", 0, 0, 0)]
        with pytest.raises(GraphError):
            FlightMultigraph(nodes, [FlightEdge(0, "a", "zz", 0)])

    def test_digraph_weight_validation(self):
        nodes = [AirportNode("a", 0, 0, 0), AirportNode("b", 0, 1, 0)]
        with pytest.raises(GraphError):
            WeightedDigraph(nodes, {("a", "b"): 0})
        with pytest.raises(GraphError):
            WeightedDigraph(nodes, {("a", "a"): 1})


class TestCollapse:
    def test_three_parallel_edges(self):
        g = collapse_multigraph(mg_from_pairs([("SP", "RJ")] * 3))
        assert g.weights == {("SP", "RJ"): 3}

    def test_empty_multigraph(self):
        g = collapse_multigraph(FlightMultigraph([], []))
        assert g.weights == {} and g.nodes == {}

    def test_direction_preserved(self):
        g = collapse_multigraph(mg_from_pairs([("SP", "RJ"), ("RJ", "SP")]))
        assert g.weights == {("SP", "RJ"): 1, ("RJ", "SP"): 1}

    @given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(lambda e: e[0] != e[1]), max_size=40))
    def test_mass_conservation(self, pairs):
        names = "abcde"
        mg = mg_from_pairs([(names[u], names[v]) for u, v in pairs]) if pairs else FlightMultigraph([], [])
        g = collapse_multigraph(mg)
        assert sum(g.weights.values()) == len(pairs)

    @given(
        st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(lambda e: e[0] != e[1]), max_size=30),
        st.randoms(),
    )
    def test_order_invariance(self, pairs, rnd):
        names = "abcde"
        named = [(names[u], names[v]) for u, v in pairs]
        shuffled = list(named)
        rnd.shuffle(shuffled)
        g1 = collapse_multigraph(mg_from_pairs(named)) if named else None
        g2 = collapse_multigraph(mg_from_pairs(shuffled)) if shuffled else None
        if named:
            assert g1.weights == g2.weights
            assert set(g1.nodes) == set(g2.nodes)


class TestStrengths:
    def test_isolated_node(self):
        nodes = [AirportNode("a", 0, 0, 0), AirportNode("b", 0, 1, 0)]
        g = WeightedDigraph(nodes, {})
        assert strengths(g, "a") == (0, 0)

    def test_star_center(self):
        g = make_graph({("x", "c"): 2, ("y", "c"): 2, ("z", "c"): 2})
        assert strengths(g, "c") == (6, 0)

    def test_two_cycle(self):
        g = make_graph({("a", "b"): 5, ("b", "a"): 5})
        assert strengths(g, "a") == (5, 5)

    def test_unknown_node(self):
        g = make_graph({("a", "b"): 1})
        with pytest.raises(GraphError):
            strengths(g, "zz")

    @given(st.dictionaries(
        st.tuples(st.sampled_from("abcd"), st.sampled_from("abcd")).filter(lambda e: e[0] != e[1]),
        st.integers(1, 9),
        max_size=12,
    ))
    def test_strength_sums(self, weights):
        if not weights:
            return
        g = make_graph(weights)
        total = sum(weights.values())
        assert sum(strengths(g, v)[0] for v in g.node_codes) == total
        assert sum(strengths(g, v)[1] for v in g.node_codes) == total


class TestConnectivity:
    def test_directed_cycle(self):
        assert is_strongly_connected(make_graph({("a", "b"): 1, ("b", "c"): 1, ("c", "a"): 1}))

    def test_directed_path(self):
        assert not is_strongly_connected(make_graph({("a", "b"): 1, ("b", "c"): 1}))

    def test_complete_bidirectional(self):
        codes = "abcd"
        weights = {(u, v): 1 for u in codes for v in codes if u != v}
        assert is_strongly_connected(make_graph(weights))

    def test_empty_graph_errors(self):
        with pytest.raises(GraphError):
            is_strongly_connected(WeightedDigraph([], {}))

    def test_against_brute_force(self):
        rng = np.random.default_rng(5)
        for trial in range(120):
            n = int(rng.integers(1, 6))
            codes = [chr(ord("a") + i) for i in range(n)]
            weights = {
                (u, v): 1
                for u in codes
                for v in codes
                if u != v and rng.random() < 0.4
            }
            nodes = [AirportNode(c, 0, i, 0) for i, c in enumerate(codes)]
            g = WeightedDigraph(nodes, weights)
            # brute force: transitive closure over all pairs
            reach = {u: {u} for u in codes}
            changed = True
            while changed:
                changed = False
                for (u, v) in weights:
                    for r in codes:
                        if u in reach[r] and v not in reach[r]:
                            reach[r].add(v)
                            changed = True
            expected = all(len(reach[u]) == n for u in codes)
            assert is_strongly_connected(g) == expected


class TestDistanceTransform:
    def test_values(self):
        g = make_graph({("a", "b"): 1, ("b", "c"): 4})
        lengths = distance_transform(g)
        assert lengths[("a", "b")] == Fraction(1)
        assert lengths[("b", "c")] == Fraction(1, 4)

    def test_monotone_in_weight(self):
        g = make_graph({("a", "b"): 10, ("b", "a"): 2})
        lengths = distance_transform(g)
        assert lengths[("a", "b")] < lengths[("b", "a")]


class TestSerialization:
    def test_round_trip_and_stability(self):
        g = make_graph({("b", "a"): 2, ("a", "b"): 1, ("a", "c"): 3})
        text = graph_to_json(g)
        g2 = graph_from_json(text)
        assert g2.weights == g.weights
        assert graph_to_json(g2) == text
        payload = json.loads(text)
        assert [e["src"] for e in payload["edges"]] == sorted(e["src"] for e in payload["edges"])
