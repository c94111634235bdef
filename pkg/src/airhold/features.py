"""Model-ready matrices: join per-edge graph features onto flight rows.

The network is built from the training split only and its per-edge features
are applied to both splits; routes that never appear in training get
all-zero graph features plus an `unseen_route` indicator instead of any
imputation. Wind directions are encoded as sin/cos pairs (359 degrees and
1 degree are neighbors).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .centrality import EdgeGraphFeatures, compute_all_edge_features
from .errors import AirholdError
from .graph import AirportNode, FlightEdge, FlightMultigraph, WeightedDigraph, collapse_multigraph
from .records import FlightRecord

__all__ = [
    "FeatureSpec",
    "FeatureMatrix",
    "GraphFeatureIndex",
    "default_registry",
    "registry_to_json",
    "registry_from_json",
    "build_multigraph",
    "attach_graph_features",
    "build_matrix",
    "matrix_to_csv",
]


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: str  # tabular | graph | indicator


_TABULAR = (
    "flight_hour",
    "wind_dir_sin",
    "wind_dir_cos",
    "wind_speed_kt",
    "visibility_m",
    "temperature_c",
    "cloud_cover_octas",
    "fc_wind_dir_sin",
    "fc_wind_dir_cos",
    "fc_wind_speed_kt",
    "fc_visibility_m",
    "fc_temperature_c",
    "geodesic_km",
    "lat_src",
    "lon_src",
    "alt_src_m",
    "lat_dst",
    "lon_dst",
    "alt_dst_m",
    "runway_head_change",
    "runway_config_change",
)

_GRAPH = EdgeGraphFeatures.FIELD_NAMES


def default_registry() -> list[FeatureSpec]:
    regs = [FeatureSpec(n, "tabular") for n in _TABULAR]
    regs += [FeatureSpec(n, "graph") for n in _GRAPH]
    regs.append(FeatureSpec("unseen_route", "indicator"))
    return regs


def registry_to_json(registry: list[FeatureSpec]) -> str:
    return json.dumps([{"name": s.name, "kind": s.kind} for s in registry], indent=2) + "\n"


def registry_from_json(text: str) -> list[FeatureSpec]:
    return [FeatureSpec(d["name"], d["kind"]) for d in json.loads(text)]


def build_multigraph(records: list[FlightRecord]) -> FlightMultigraph:
    """One node per airport seen, one edge per flight (parallel edges kept)."""
    airports: dict[str, AirportNode] = {}
    edges: list[FlightEdge] = []
    for i, r in enumerate(records):
        for code, lat, lon, alt in (
            (r.origin, r.lat_src, r.lon_src, r.alt_src_m),
            (r.destination, r.lat_dst, r.lon_dst, r.alt_dst_m),
        ):
            if code not in airports:
                airports[code] = AirportNode(code, lat, lon, alt)
        edges.append(FlightEdge(id=i, src=r.origin, dst=r.destination, record_ref=i))
    return FlightMultigraph(list(airports.values()), edges)


class GraphFeatureIndex:
    """Per-route graph features computed from the training flights only."""

    def __init__(self, train_records: list[FlightRecord] | None = None, digraph: WeightedDigraph | None = None):
        if digraph is None:
            if train_records is None:
                raise AirholdError("need train records or a digraph")
            digraph = collapse_multigraph(build_multigraph(train_records))
        self.digraph: WeightedDigraph = digraph
        self.edge_features = compute_all_edge_features(self.digraph)

    def lookup(self, origin: str, destination: str) -> tuple[EdgeGraphFeatures, bool]:
        """(features, unseen) for a route; zeros + unseen=True off the graph."""
        feats = self.edge_features.get((origin, destination))
        if feats is None:
            return EdgeGraphFeatures(0.0, 0.0, 0.0, 0, 0, 0.0), True
        return feats, False


@dataclass(frozen=True)
class AugmentedRecord:
    record: FlightRecord
    graph: EdgeGraphFeatures
    unseen_route: bool


def attach_graph_features(
    train_records: list[FlightRecord],
    records: list[FlightRecord],
    index: GraphFeatureIndex | None = None,
) -> list[AugmentedRecord]:
    """Attach training-graph edge features to `records` (train or test)."""
    if index is None:
        index = GraphFeatureIndex(train_records)
    out = []
    for r in records:
        feats, unseen = index.lookup(r.origin, r.destination)
        out.append(AugmentedRecord(r, feats, unseen))
    return out


@dataclass
class FeatureMatrix:
    names: list[str]
    rows: np.ndarray  # (n, p) float64
    labels_cls: np.ndarray  # (n,) bool
    labels_reg: np.ndarray  # (n,) float64

    def __post_init__(self):
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.names):
            raise AirholdError("matrix width disagrees with registry")
        if len(set(self.names)) != len(self.names):
            raise AirholdError("duplicate feature names")


def _sin_cos(deg: float) -> tuple[float, float]:
    rad = math.radians(deg % 360.0)
    return math.sin(rad), math.cos(rad)


def _encode(aug: AugmentedRecord, registry: list[FeatureSpec]) -> list[float]:
    r = aug.record
    wind_sin, wind_cos = _sin_cos(r.wind_dir_deg)
    fc_sin, fc_cos = _sin_cos(r.fc_wind_dir_deg)
    graph_vals = dict(zip(_GRAPH, aug.graph.as_tuple()))
    values = {
        "flight_hour": float(r.flight_hour),
        "wind_dir_sin": wind_sin,
        "wind_dir_cos": wind_cos,
        "wind_speed_kt": r.wind_speed_kt,
        "visibility_m": r.visibility_m,
        "temperature_c": r.temperature_c,
        "cloud_cover_octas": r.cloud_cover_octas,
        "fc_wind_dir_sin": fc_sin,
        "fc_wind_dir_cos": fc_cos,
        "fc_wind_speed_kt": r.fc_wind_speed_kt,
        "fc_visibility_m": r.fc_visibility_m,
        "fc_temperature_c": r.fc_temperature_c,
        "geodesic_km": r.geodesic_km,
        "lat_src": r.lat_src,
        "lon_src": r.lon_src,
        "alt_src_m": r.alt_src_m,
        "lat_dst": r.lat_dst,
        "lon_dst": r.lon_dst,
        "alt_dst_m": r.alt_dst_m,
        "runway_head_change": float(r.runway_head_change),
        "runway_config_change": float(r.runway_config_change),
        "unseen_route": float(aug.unseen_route),
        **{k: float(v) for k, v in graph_vals.items()},
    }
    return [values[s.name] for s in registry]


def build_matrix(
    augmented: list[AugmentedRecord], registry: list[FeatureSpec] | None = None
) -> FeatureMatrix:
    """Numeric encoding in registry column order; labels extracted."""
    if registry is None:
        registry = default_registry()
    n, p = len(augmented), len(registry)
    rows = np.zeros((n, p))
    for i, aug in enumerate(augmented):
        rows[i, :] = _encode(aug, registry)
    bad = np.argwhere(~np.isfinite(rows))
    if bad.size:
        i, j = bad[0]
        raise AirholdError(f"non-finite value at row {i}, feature '{registry[j].name}'")
    labels_cls = np.array([a.record.holding for a in augmented], dtype=bool)
    labels_reg = np.array([a.record.holding_seconds for a in augmented])
    return FeatureMatrix([s.name for s in registry], rows, labels_cls, labels_reg)


MATRIX_LABEL_COLUMNS = ("holding", "holding_seconds")


def matrix_to_csv(m: FeatureMatrix) -> str:
    """Registry columns then the two label columns; floats use repr."""
    header = ",".join(list(m.names) + list(MATRIX_LABEL_COLUMNS))
    lines = [header]
    for i in range(m.rows.shape[0]):
        vals = [repr(float(v)) for v in m.rows[i]]
        vals.append("1" if m.labels_cls[i] else "0")
        vals.append(repr(float(m.labels_reg[i])))
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


def matrix_from_csv(text: str, registry: list[FeatureSpec]) -> FeatureMatrix:
    lines = [ln for ln in text.splitlines() if ln]
    expected = list(s.name for s in registry) + list(MATRIX_LABEL_COLUMNS)
    header = lines[0].split(",")
    if header != expected:
        raise AirholdError("matrix header does not match registry")
    n = len(lines) - 1
    p = len(registry)
    rows = np.zeros((n, p))
    labels_cls = np.zeros(n, dtype=bool)
    labels_reg = np.zeros(n)
    for i, ln in enumerate(lines[1:]):
        parts = ln.split(",")
        rows[i, :] = [float(x) for x in parts[:p]]
        labels_cls[i] = parts[p] == "1"
        labels_reg[i] = float(parts[p + 1])
    return FeatureMatrix([s.name for s in registry], rows, labels_cls, labels_reg)
