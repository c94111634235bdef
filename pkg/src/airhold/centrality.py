"""Edge-level network metrics on the weighted flight digraph.

Five per-edge features, plus the two kernels (max-flow, PageRank power
iteration) they are built on:

  * shortest-path edge betweenness under inverse-weight lengths
  * flow betweenness (share of all-pairs max-flow routed through the edge)
  * local edge connectivity (u->v min cut = u->v max flow)
  * degree difference of both endpoints (weighted in minus out strength)
  * Google matrix transition entry for the edge

Shortest-path arithmetic uses exact rationals (weights are integers, so
lengths 1/w are Fractions); equal-length paths are detected exactly instead
of through float tolerances. Max-flow arithmetic is all-integer. Every
kernel iterates nodes and edges in lexicographic order, so results are
reproducible bit for bit; a parallel fan-out over sources/pairs would have
to reduce in this same order to keep that guarantee.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConvergenceError, GraphError
from .graph import WeightedDigraph, degree_difference, distance_transform

__all__ = [
    "EdgeGraphFeatures",
    "GoogleMatrix",
    "edge_betweenness",
    "max_flow",
    "flow_betweenness",
    "edge_connectivity",
    "google_matrix",
    "pagerank",
    "compute_all_edge_features",
    "features_to_csv",
]


@dataclass(frozen=True)
class EdgeGraphFeatures:
    """The five network metrics attached to every flight on a route."""

    betweenness: float
    flow_betweenness: float
    edge_connectivity: float
    degree_diff_src: int
    degree_diff_dst: int
    google_entry: float

    FIELD_NAMES = (
        "betweenness",
        "flow_betweenness",
        "edge_connectivity",
        "dd_src",
        "dd_dst",
        "google_entry",
    )

    def __post_init__(self):
        if self.betweenness < 0 or self.flow_betweenness < 0 or self.edge_connectivity < 0:
            raise GraphError("centrality features must be nonnegative")
        if not 0.0 <= self.google_entry <= 1.0:
            raise GraphError(f"google_entry {self.google_entry} outside [0, 1]")

    def as_tuple(self) -> tuple[float, float, float, int, int, float]:
        return (
            self.betweenness,
            self.flow_betweenness,
            self.edge_connectivity,
            self.degree_diff_src,
            self.degree_diff_dst,
            self.google_entry,
        )


def _dijkstra(
    g: WeightedDigraph, lengths: dict[tuple[str, str], Fraction], source: str
):
    """Single-source shortest paths with exact path counting.

    Returns (settled order, dist, sigma, preds) where sigma[v] counts
    shortest source->v paths and preds[v] lists the predecessors on them.
    """
    dist: dict[str, Fraction] = {source: Fraction(0)}
    sigma: dict[str, int] = {source: 1}
    preds: dict[str, list[str]] = {source: []}
    order: list[str] = []
    done: set[str] = set()
    heap: list[tuple[Fraction, str]] = [(Fraction(0), source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        order.append(u)
        for v in g.successors(u):
            nd = d + lengths[(u, v)]
            old = dist.get(v)
            if old is None or nd < old:
                dist[v] = nd
                sigma[v] = sigma[u]
                preds[v] = [u]
                heapq.heappush(heap, (nd, v))
            elif nd == old:
                sigma[v] += sigma[u]
                preds[v].append(u)
    return order, dist, sigma, preds


def edge_betweenness(g: WeightedDigraph) -> dict[tuple[str, str], float]:
    """Unnormalized shortest-path betweenness for every weighted edge.

    score(e) = sum over ordered node pairs (s, t) of the fraction of
    shortest s->t paths (lengths 1/weight) that traverse e. Brandes
    accumulation, one Dijkstra per source.
    """
    if not g.nodes:
        raise GraphError("empty graph")
    lengths = distance_transform(g)
    score: dict[tuple[str, str], Fraction] = {e: Fraction(0) for e in g.weights}
    for s in g.node_codes:
        order, _, sigma, preds = _dijkstra(g, lengths, s)
        delta: dict[str, Fraction] = {v: Fraction(0) for v in order}
        for w in reversed(order):
            for v in preds[w]:
                c = Fraction(sigma[v], sigma[w]) * (1 + delta[w])
                score[(v, w)] += c
                delta[v] += c
    return {e: float(val) for e, val in score.items()}


class _DinicSolver:
    """Max-flow on the weighted digraph with a fixed augmenting strategy.

    Node order and adjacency are lexicographic, BFS builds level graphs,
    DFS sends blocking flows scanning arcs in insertion order; the flow
    decomposition this produces is deterministic (max flows are not
    mathematically unique, so flow-betweenness scores are solver-canonical).
    """

    def __init__(self, g: WeightedDigraph):
        self.codes = g.node_codes
        self.index = {c: i for i, c in enumerate(self.codes)}
        n = len(self.codes)
        self.n = n
        self.head: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []
        self.orig_keys = sorted(g.weights)
        for u, v in self.orig_keys:
            ui, vi = self.index[u], self.index[v]
            self.head[ui].append(len(self.to))
            self.to.append(vi)
            self.cap.append(g.weights[(u, v)])
            self.head[vi].append(len(self.to))
            self.to.append(ui)
            self.cap.append(0)

    def solve(self, s: str, t: str) -> tuple[int, dict[tuple[str, str], int]]:
        if s == t:
            raise GraphError("source equals sink")
        if s not in self.index or t not in self.index:
            raise GraphError(f"unknown node {s if s not in self.index else t}")
        cap = list(self.cap)
        si, ti = self.index[s], self.index[t]
        total = 0
        while True:
            level = self._levels(cap, si)
            if level[ti] < 0:
                break
            it = [0] * self.n
            while True:
                pushed = self._augment(cap, level, it, si, ti, 1 << 62)
                if pushed == 0:
                    break
                total += pushed
        flows = {
            key: self.cap[2 * i] - cap[2 * i] for i, key in enumerate(self.orig_keys)
        }
        return total, flows

    def _levels(self, cap: list[int], si: int) -> list[int]:
        level = [-1] * self.n
        level[si] = 0
        queue = [si]
        for u in queue:
            for ei in self.head[u]:
                v = self.to[ei]
                if cap[ei] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level

    def _augment(self, cap, level, it, u, ti, limit) -> int:
        if u == ti:
            return limit
        while it[u] < len(self.head[u]):
            ei = self.head[u][it[u]]
            v = self.to[ei]
            if cap[ei] > 0 and level[v] == level[u] + 1:
                pushed = self._augment(cap, level, it, v, ti, min(limit, cap[ei]))
                if pushed > 0:
                    cap[ei] -= pushed
                    cap[ei ^ 1] += pushed
                    return pushed
            it[u] += 1
        return 0


def max_flow(
    g: WeightedDigraph, s: str, t: str
) -> tuple[int, dict[tuple[str, str], int]]:
    """Maximum s->t flow with capacities = weights.

    Returns (value, per-edge flows on the original edges). The value equals
    the minimum s-t cut capacity; flows satisfy 0 <= f(e) <= w(e) and
    conservation at every node except s and t.
    """
    return _DinicSolver(g).solve(s, t)


def _all_pairs_max_flow(g: WeightedDigraph):
    """(total value, per-edge flow sums, per-pair values) over ordered pairs."""
    solver = _DinicSolver(g)
    sums = {e: 0 for e in g.weights}
    values: dict[tuple[str, str], int] = {}
    total = 0
    for s in g.node_codes:
        for t in g.node_codes:
            if s == t:
                continue
            value, flows = solver.solve(s, t)
            values[(s, t)] = value
            total += value
            for e, f in flows.items():
                sums[e] += f
    return total, sums, values


def flow_betweenness(g: WeightedDigraph) -> dict[tuple[str, str], float]:
    """Share of all-pairs max flow routed through each edge.

    score(e) = sum over ordered pairs of f_st(e), divided by
    max(1, sum of all max-flow values); zero when no pair routes through e.
    """
    if not g.nodes:
        raise GraphError("empty graph")
    total, sums, _ = _all_pairs_max_flow(g)
    denom = max(1, total)
    return {e: sums[e] / denom for e in g.weights}


def edge_connectivity(g: WeightedDigraph, u: str, v: str) -> float:
    """Weighted local min cut separating v from u; defined on existing edges."""
    if (u, v) not in g.weights:
        raise GraphError(f"({u},{v}) is not an edge")
    value, _ = max_flow(g, u, v)
    return float(value)


@dataclass(frozen=True)
class GoogleMatrix:
    """Damped row-stochastic transition matrix over the airport set."""

    node_order: tuple[str, ...]
    damping: float
    rows: np.ndarray  # shape (N, N); rows sum to 1

    def entry(self, u: str, v: str) -> float:
        i = self.node_order.index(u)
        j = self.node_order.index(v)
        return float(self.rows[i, j])


def google_matrix(g: WeightedDigraph, d: float = 0.85) -> GoogleMatrix:
    """G(u, v) = (1-d)/N + d * w(u, v) / out_strength(u); dangling rows uniform.

    Every row sums to 1 (checked to 1e-12) and every entry is at least
    (1-d)/N up to float rounding.
    """
    if not 0.0 < d < 1.0:
        raise GraphError(f"damping {d} outside (0, 1)")
    codes = g.node_codes
    n = len(codes)
    if n == 0:
        raise GraphError("empty graph")
    index = {c: i for i, c in enumerate(codes)}
    rows = np.zeros((n, n))
    for i, u in enumerate(codes):
        out = sum(g.weights[(u, v)] for v in g.successors(u))
        if out == 0:
            rows[i, :] = 1.0 / n
        else:
            rows[i, :] = (1.0 - d) / n
            for v in g.successors(u):
                rows[i, index[v]] += d * g.weights[(u, v)] / out
    sums = rows.sum(axis=1)
    if not np.all(np.abs(sums - 1.0) <= 1e-12):
        raise GraphError("google matrix row sums drifted beyond 1e-12")
    return GoogleMatrix(tuple(codes), d, rows)


def pagerank(
    g: WeightedDigraph,
    d: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> dict[str, float]:
    """Stationary vector of the Google matrix by power iteration.

    Starts from the uniform vector; stops when the L1 residual ||pG - p||
    drops to tol. Scores sum to 1.
    """
    gm = google_matrix(g, d)
    n = len(gm.node_order)
    p = np.full(n, 1.0 / n)
    residual = float("inf")
    for _ in range(max_iter):
        nxt = p @ gm.rows
        residual = float(np.abs(nxt - p).sum())
        p = nxt
        if residual <= tol:
            return {c: float(p[i]) for i, c in enumerate(gm.node_order)}
    raise ConvergenceError(f"pagerank did not converge in {max_iter} iterations", residual)


def compute_all_edge_features(
    g: WeightedDigraph, d: float = 0.85
) -> dict[tuple[str, str], EdgeGraphFeatures]:
    """Assemble the five per-edge features for every weighted edge."""
    if not g.nodes:
        raise GraphError("empty graph")
    bet = edge_betweenness(g)
    total, sums, values = _all_pairs_max_flow(g)
    denom = max(1, total)
    gm = google_matrix(g, d)
    index = {c: i for i, c in enumerate(gm.node_order)}
    dd = {v: degree_difference(g, v) for v in g.node_codes}
    out: dict[tuple[str, str], EdgeGraphFeatures] = {}
    for u, v in sorted(g.weights):
        out[(u, v)] = EdgeGraphFeatures(
            betweenness=bet[(u, v)],
            flow_betweenness=sums[(u, v)] / denom,
            edge_connectivity=float(values[(u, v)]),
            degree_diff_src=dd[u],
            degree_diff_dst=dd[v],
            google_entry=float(gm.rows[index[u], index[v]]),
        )
    return out


FEATURE_CSV_HEADER = (
    "src,dst,weight,betweenness,flow_betweenness,edge_connectivity,"
    "dd_src,dd_dst,google_entry"
)


def features_to_csv(
    g: WeightedDigraph, feats: dict[tuple[str, str], EdgeGraphFeatures]
) -> str:
    """Per-edge feature dump, rows sorted by (src, dst)."""
    lines = [FEATURE_CSV_HEADER]
    for u, v in sorted(feats):
        f = feats[(u, v)]
        lines.append(
            f"{u},{v},{g.weights[(u, v)]},{f.betweenness!r},{f.flow_betweenness!r},"
            f"{f.edge_connectivity!r},{f.degree_diff_src},{f.degree_diff_dst},"
            f"{f.google_entry!r}"
        )
    return "\n".join(lines) + "\n"
