"""Flight network data structures.

A flight set is first a directed multigraph (one edge per flight, parallel
edges allowed) and is collapsed into a weighted digraph whose integer weight
on (u, v) counts the flights u -> v. All structures are immutable after
construction and safe for concurrent reads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import GraphError

__all__ = [
    "AirportNode",
    "FlightEdge",
    "FlightMultigraph",
    "WeightedDigraph",
    "collapse_multigraph",
    "strengths",
    "degree_difference",
    "is_strongly_connected",
    "distance_transform",
    "graph_to_json",
    "graph_from_json",
]


@dataclass(frozen=True)
class AirportNode:
    """One airport: short code plus static geography."""

    code: str
    lat: float
    lon: float
    altitude: float

    def __post_init__(self):
        if not self.code:
            raise GraphError("airport code must be non-empty")
        if not -90.0 <= self.lat <= 90.0:
            raise GraphError(f"{self.code}: lat {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise GraphError(f"{self.code}: lon {self.lon} outside [-180, 180]")
        if self.altitude < -430.0:
            raise GraphError(f"{self.code}: altitude {self.altitude} below -430 m")


@dataclass(frozen=True)
class FlightEdge:
    """One flight, directed from departure to destination airport."""

    id: int
    src: str
    dst: str
    record_ref: int

    def __post_init__(self):
        if self.src == self.dst:
            raise GraphError(f"flight {self.id}: self-loop {self.src}->{self.dst}")


class FlightMultigraph:
    """Directed multigraph of flights; parallel edges are kept."""

    def __init__(self, nodes: list[AirportNode], edges: list[FlightEdge]):
        self.nodes: dict[str, AirportNode] = {}
        for n in nodes:
            if n.code in self.nodes:
                raise GraphError(f"duplicate airport code {n.code}")
            self.nodes[n.code] = n
        seen_ids = set()
        for e in edges:
            if e.id in seen_ids:
                raise GraphError(f"duplicate flight edge id {e.id}")
            seen_ids.add(e.id)
            if e.src not in self.nodes or e.dst not in self.nodes:
                raise GraphError(f"flight {e.id}: endpoint not in node set")
        self.edges: tuple[FlightEdge, ...] = tuple(edges)

    def __len__(self):
        return len(self.edges)


class WeightedDigraph:
    """Weight-aggregated flight network: weight(u, v) = flights u -> v."""

    def __init__(self, nodes: list[AirportNode], weights: dict[tuple[str, str], int]):
        self.nodes: dict[str, AirportNode] = {n.code: n for n in nodes}
        if len(self.nodes) != len(nodes):
            raise GraphError("duplicate airport code")
        for (u, v), w in weights.items():
            if u == v:
                raise GraphError(f"self-loop weight key ({u},{v})")
            if u not in self.nodes or v not in self.nodes:
                raise GraphError(f"weight key ({u},{v}) references unknown node")
            if not isinstance(w, int) or w < 1:
                raise GraphError(f"weight ({u},{v})={w} must be an integer >= 1")
        self.weights: dict[tuple[str, str], int] = dict(weights)
        # adjacency with lexicographically sorted neighbors: fixed iteration
        # order is what makes every downstream kernel deterministic
        succ: dict[str, list[str]] = {c: [] for c in self.nodes}
        pred: dict[str, list[str]] = {c: [] for c in self.nodes}
        for u, v in sorted(self.weights):
            succ[u].append(v)
            pred[v].append(u)
        self._succ = succ
        self._pred = pred

    @property
    def node_codes(self) -> list[str]:
        return sorted(self.nodes)

    def successors(self, u: str) -> list[str]:
        return self._succ[u]

    def predecessors(self, v: str) -> list[str]:
        return self._pred[v]

    def __contains__(self, code: str) -> bool:
        return code in self.nodes


def collapse_multigraph(mg: FlightMultigraph) -> WeightedDigraph:
    """Aggregate parallel flight edges into integer weights."""
    weights: dict[tuple[str, str], int] = {}
    for e in mg.edges:
        key = (e.src, e.dst)
        weights[key] = weights.get(key, 0) + 1
    return WeightedDigraph(list(mg.nodes.values()), weights)


def strengths(g: WeightedDigraph, v: str) -> tuple[int, int]:
    """(in_strength, out_strength): weighted degree sums at node v."""
    if v not in g:
        raise GraphError(f"unknown node {v}")
    in_s = sum(g.weights[(u, v)] for u in g.predecessors(v))
    out_s = sum(g.weights[(v, u)] for u in g.successors(v))
    return in_s, out_s


def degree_difference(g: WeightedDigraph, v: str) -> int:
    """in_strength - out_strength; positive marks a net sink."""
    in_s, out_s = strengths(g, v)
    return in_s - out_s


def _reachable(g: WeightedDigraph, root: str, forward: bool) -> set[str]:
    nxt = g.successors if forward else g.predecessors
    seen = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for w in nxt(u):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def is_strongly_connected(g: WeightedDigraph) -> bool:
    """True iff every node reaches every other along directed edges."""
    codes = g.node_codes
    if not codes:
        raise GraphError("empty graph")
    root = codes[0]
    n = len(codes)
    return len(_reachable(g, root, True)) == n and len(_reachable(g, root, False)) == n


def distance_transform(g: WeightedDigraph) -> dict[tuple[str, str], Fraction]:
    """Edge length 1/weight: heavy-traffic routes become short.

    Lengths are exact rationals so shortest-path tie detection never
    depends on float rounding.
    """
    return {key: Fraction(1, w) for key, w in g.weights.items()}


def graph_to_json(g: WeightedDigraph) -> str:
    """Byte-stable JSON dump (nodes and edges sorted lexicographically)."""
    payload = {
        "nodes": [
            {"code": n.code, "lat": n.lat, "lon": n.lon, "alt": n.altitude}
            for n in (g.nodes[c] for c in g.node_codes)
        ],
        "edges": [
            {"src": u, "dst": v, "weight": g.weights[(u, v)]}
            for u, v in sorted(g.weights)
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def graph_from_json(text: str) -> WeightedDigraph:
    payload = json.loads(text)
    nodes = [
        AirportNode(d["code"], d["lat"], d["lon"], d["alt"]) for d in payload["nodes"]
    ]
    weights = {(d["src"], d["dst"]): d["weight"] for d in payload["edges"]}
    return WeightedDigraph(nodes, weights)
