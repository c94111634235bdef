"""Graph attention network over the directed flight multigraph.

Flights stay parallel edges (no collapse); each carries its tabular feature
vector into the attention score, so two flights on the same route can get
different attention. The raw score for edge k = (i -> j) is

    s_k = LeakyReLU( a . [ W h_i | W h_j | W2 e_k ] )

normalized by a softmax over all edges arriving at j (information flows
along the flight direction). Aggregated messages pass through ELU per head;
heads concatenate on hidden layers and average on the final one. A small
MLP head scores every individual flight from [h_src | h_dst | e_k].

Airports with no incoming flights get one self-loop edge whose feature
vector is zero except a trailing is-self flag, so they still update instead
of freezing after layer 1; nodes that do receive flights are left alone, so
a destination with k incoming flights softmaxes over exactly those k. The
whole forward/backward pass is plain numpy with a fixed edge order (sorted
by destination), which keeps training reproducible and lets the backward
pass be checked against central finite differences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import AirholdError, DivergenceError, ModelFormatError, ModelVersionError
from .records import FlightRecord

__all__ = [
    "GatConfig",
    "GatParameters",
    "GraphBatch",
    "NodeScaler",
    "init_params",
    "attention_scores",
    "layer_forward",
    "edge_predict",
    "train",
    "gradient_check",
    "save_params",
    "load_params",
]

PARAMS_FORMAT_VERSION = "airhold-gat-v1"

# per-flight attention/head inputs: the tabular feature block, labels excluded
EDGE_FEATURE_NAMES = (
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
    "runway_head_change",
    "runway_config_change",
    "is_self",
)

NODE_FEATURE_NAMES = ("lat", "lon", "altitude", "in_strength", "out_strength")


@dataclass
class GatConfig:
    layers: int = 1
    heads: int = 4
    node_dim: int = len(NODE_FEATURE_NAMES)
    hidden_dim: int = 8
    leaky_slope: float = 0.2
    positive_class_weight: float | None = None  # None: N_neg / N_pos of the batch
    learning_rate: float = 0.05
    epochs: int = 100
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.layers <= 64:
            raise AirholdError(f"layers {self.layers} outside 1..64")
        if self.heads < 1 or self.node_dim < 1 or self.hidden_dim < 1:
            raise AirholdError("heads/node_dim/hidden_dim must be positive")
        if self.leaky_slope <= 0 or self.learning_rate < 0 or self.epochs < 0:
            raise AirholdError("leaky_slope/learning_rate/epochs out of range")


@dataclass
class NodeScaler:
    """Standardization constants fit on a training batch, reusable on test."""

    node_mean: np.ndarray
    node_std: np.ndarray
    edge_mean: np.ndarray
    edge_std: np.ndarray


def _safe_std(x: np.ndarray) -> np.ndarray:
    s = x.std(axis=0)
    return np.where(s < 1e-12, 1.0, s)


class GraphBatch:
    """Full-batch multigraph: airports as nodes, flights as parallel edges.

    Edges are stored sorted by destination (stable in original flight
    order); nodes with zero in-degree receive a self-loop so softmax
    segments cover every airport. `flight_slots` maps each original flight
    to its slot in the sorted arrays.
    """

    def __init__(
        self,
        node_features: np.ndarray,
        src: np.ndarray,
        dst: np.ndarray,
        edge_features: np.ndarray,
        labels: np.ndarray,
        scaler: NodeScaler | None = None,
        node_codes: list[str] | None = None,
    ):
        n = node_features.shape[0]
        e = src.shape[0]
        if np.any(src == dst):
            raise AirholdError("self-loop flight in batch")
        if scaler is None:
            scaler = NodeScaler(
                node_features.mean(axis=0),
                _safe_std(node_features),
                edge_features.mean(axis=0) if e else np.zeros(edge_features.shape[1]),
                _safe_std(edge_features) if e else np.ones(edge_features.shape[1]),
            )
        self.scaler = scaler
        self.node_codes = node_codes or [str(i) for i in range(n)]
        self.n_nodes = n
        self.n_flights = e
        self.node_x = (node_features - scaler.node_mean) / scaler.node_std

        ef = (edge_features - scaler.edge_mean) / scaler.edge_std
        # self-loops (zero features, is-self marker set) only where nothing
        # arrives; destinations with real flights softmax over those alone
        lonely = np.flatnonzero(np.bincount(dst, minlength=n) == 0)
        de = ef.shape[1] + 1
        feats = np.zeros((e + lonely.shape[0], de))
        feats[:e, :-1] = ef
        feats[e:, -1] = 1.0
        all_src = np.concatenate([src, lonely])
        all_dst = np.concatenate([dst, lonely])

        perm = np.argsort(all_dst, kind="stable")
        self.src = all_src[perm].astype(np.int64)
        self.dst = all_dst[perm].astype(np.int64)
        self.edge_x = feats[perm]
        inv = np.empty_like(perm)
        inv[perm] = np.arange(perm.shape[0])
        self.flight_slots = inv[:e]
        self.labels = labels.astype(float)
        counts = np.bincount(self.dst, minlength=n)
        self.seg_starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        self.edge_dim = de

    @classmethod
    def from_records(
        cls, records: list[FlightRecord], scaler: NodeScaler | None = None
    ) -> "GraphBatch":
        from .features import _sin_cos  # local import to avoid a cycle

        codes = sorted({r.origin for r in records} | {r.destination for r in records})
        index = {c: i for i, c in enumerate(codes)}
        geo: dict[str, tuple[float, float, float]] = {}
        for r in records:
            geo.setdefault(r.origin, (r.lat_src, r.lon_src, r.alt_src_m))
            geo.setdefault(r.destination, (r.lat_dst, r.lon_dst, r.alt_dst_m))
        src = np.array([index[r.origin] for r in records], dtype=np.int64)
        dst = np.array([index[r.destination] for r in records], dtype=np.int64)
        in_s = np.bincount(dst, minlength=len(codes)).astype(float)
        out_s = np.bincount(src, minlength=len(codes)).astype(float)
        node_feats = np.array(
            [[*geo[c], in_s[index[c]], out_s[index[c]]] for c in codes]
        )
        rows = []
        for r in records:
            ws, wc = _sin_cos(r.wind_dir_deg)
            fs, fc = _sin_cos(r.fc_wind_dir_deg)
            rows.append(
                [
                    float(r.flight_hour), ws, wc, r.wind_speed_kt, r.visibility_m,
                    r.temperature_c, r.cloud_cover_octas, fs, fc, r.fc_wind_speed_kt,
                    r.fc_visibility_m, r.fc_temperature_c, r.geodesic_km,
                    float(r.runway_head_change), float(r.runway_config_change),
                ]
            )
        edge_feats = np.array(rows) if rows else np.zeros((0, len(EDGE_FEATURE_NAMES) - 1))
        labels = np.array([r.holding for r in records], dtype=float)
        return cls(node_feats, src, dst, edge_feats, labels, scaler, codes)


@dataclass
class _Head:
    W: np.ndarray  # (d_in, dh) node transform
    W2: np.ndarray  # (de, dh) edge transform
    a: np.ndarray  # (3*dh,) attention vector


@dataclass
class GatParameters:
    layers: list[list[_Head]]
    mlp_w1: np.ndarray
    mlp_b1: np.ndarray
    mlp_w2: np.ndarray
    mlp_b2: np.ndarray

    def named_tensors(self):
        for li, heads in enumerate(self.layers):
            for hi, head in enumerate(heads):
                yield f"layer{li}.head{hi}.W", head.W
                yield f"layer{li}.head{hi}.W2", head.W2
                yield f"layer{li}.head{hi}.a", head.a
        yield "mlp.w1", self.mlp_w1
        yield "mlp.b1", self.mlp_b1
        yield "mlp.w2", self.mlp_w2
        yield "mlp.b2", self.mlp_b2


def _glorot(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    fan_in = shape[0] if len(shape) > 1 else shape[0]
    fan_out = shape[1] if len(shape) > 1 else 1
    s = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-s, s, size=shape)


def _layer_dims(cfg: GatConfig) -> list[int]:
    dims = [cfg.node_dim]
    for l in range(1, cfg.layers):
        dims.append(cfg.hidden_dim * cfg.heads)
    return dims


def init_params(cfg: GatConfig, edge_dim: int, rng: np.random.Generator | None = None) -> GatParameters:
    rng = rng or np.random.default_rng(cfg.seed)
    dh = cfg.hidden_dim
    layers = []
    for d_in in _layer_dims(cfg):
        heads = [
            _Head(
                W=_glorot(rng, (d_in, dh)),
                W2=_glorot(rng, (edge_dim, dh)),
                a=_glorot(rng, (3 * dh,)),
            )
            for _ in range(cfg.heads)
        ]
        layers.append(heads)
    mlp_in = 2 * dh + edge_dim
    return GatParameters(
        layers=layers,
        mlp_w1=_glorot(rng, (mlp_in, dh)),
        mlp_b1=np.zeros(dh),
        mlp_w2=_glorot(rng, (dh,)),
        mlp_b2=np.zeros(1),
    )


def _leaky(z: np.ndarray, slope: float) -> np.ndarray:
    return np.where(z > 0, z, slope * z)


def _elu(z: np.ndarray) -> np.ndarray:
    return np.where(z > 0, z, np.expm1(np.minimum(z, 0.0)))


def _segment_softmax(s: np.ndarray, seg_starts: np.ndarray, dst: np.ndarray) -> np.ndarray:
    smax = np.maximum.reduceat(s, seg_starts)
    ex = np.exp(s - smax[dst])
    sums = np.add.reduceat(ex, seg_starts)
    return ex / sums[dst]


def _forward(params: GatParameters, cfg: GatConfig, batch: GraphBatch):
    """Full forward pass; caches hold what the backward pass needs."""
    h = batch.node_x
    caches = []
    for li, heads in enumerate(params.layers):
        final = li == cfg.layers - 1
        head_caches = []
        outs = []
        for head in heads:
            wh = h @ head.W
            w2e = batch.edge_x @ head.W2
            dh = head.W.shape[1]
            a1, a2, a3 = head.a[:dh], head.a[dh : 2 * dh], head.a[2 * dh :]
            z = wh[batch.src] @ a1 + wh[batch.dst] @ a2 + w2e @ a3
            s = _leaky(z, cfg.leaky_slope)
            alpha = _segment_softmax(s, batch.seg_starts, batch.dst)
            msg = alpha[:, None] * wh[batch.src]
            agg = np.add.reduceat(msg, batch.seg_starts, axis=0)
            out = _elu(agg)
            head_caches.append({"wh": wh, "w2e": w2e, "z": z, "alpha": alpha, "agg": agg, "out": out})
            outs.append(out)
        h_next = np.mean(outs, axis=0) if final else np.concatenate(outs, axis=1)
        caches.append({"h_in": h, "heads": head_caches})
        h = h_next
    # MLP head over real flights only
    u = np.concatenate(
        [
            h[batch.src[batch.flight_slots]],
            h[batch.dst[batch.flight_slots]],
            batch.edge_x[batch.flight_slots],
        ],
        axis=1,
    )
    pre1 = u @ params.mlp_w1 + params.mlp_b1
    v = _elu(pre1)
    logits = v @ params.mlp_w2 + params.mlp_b2[0]
    return h, logits, {"layers": caches, "u": u, "pre1": pre1, "v": v, "h_final": h}


def _loss_from_logits(logits: np.ndarray, y: np.ndarray, w: np.ndarray) -> float:
    sp = np.maximum(logits, 0.0) + np.log1p(np.exp(-np.abs(logits)))
    return float(np.mean(w * (sp - y * logits)))


def _zero_like_params(params: GatParameters) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(t) for name, t in params.named_tensors()}


def _backward(params: GatParameters, cfg: GatConfig, batch: GraphBatch, cache, logits) -> dict[str, np.ndarray]:
    """Analytic gradients of the class-weighted BCE wrt every tensor."""
    y = batch.labels
    w = _class_weights(batch, cfg)
    grads = _zero_like_params(params)
    e_fl = batch.n_flights

    p_hat = 1.0 / (1.0 + np.exp(-logits))
    dlogits = w * (p_hat - y) / e_fl

    v = cache["v"]
    pre1 = cache["pre1"]
    u = cache["u"]
    grads["mlp.w2"][:] = v.T @ dlogits
    grads["mlp.b2"][:] = dlogits.sum()
    dv = np.outer(dlogits, params.mlp_w2)
    dpre1 = dv * np.where(pre1 > 0, 1.0, _elu(pre1) + 1.0)
    grads["mlp.w1"][:] = u.T @ dpre1
    grads["mlp.b1"][:] = dpre1.sum(axis=0)
    du = dpre1 @ params.mlp_w1.T

    dh = cfg.hidden_dim
    d_hfinal = np.zeros_like(cache["h_final"])
    fsrc = batch.src[batch.flight_slots]
    fdst = batch.dst[batch.flight_slots]
    np.add.at(d_hfinal, fsrc, du[:, :dh])
    np.add.at(d_hfinal, fdst, du[:, dh : 2 * dh])

    d_h = d_hfinal
    for li in range(cfg.layers - 1, -1, -1):
        layer_cache = cache["layers"][li]
        heads = params.layers[li]
        h_in = layer_cache["h_in"]
        final = li == cfg.layers - 1
        d_h_in = np.zeros_like(h_in)
        for hi, head in enumerate(heads):
            hc = layer_cache["heads"][hi]
            if final:
                d_out = d_h / len(heads)
            else:
                d_out = d_h[:, hi * dh : (hi + 1) * dh]
            d_agg = d_out * np.where(hc["agg"] > 0, 1.0, hc["out"] + 1.0)
            d_msg = d_agg[batch.dst]
            wh = hc["wh"]
            alpha = hc["alpha"]
            d_alpha = np.einsum("ij,ij->i", d_msg, wh[batch.src])
            d_wh = np.zeros_like(wh)
            np.add.at(d_wh, batch.src, alpha[:, None] * d_msg)
            # softmax backward within destination segments
            t1 = alpha * d_alpha
            seg = np.add.reduceat(t1, batch.seg_starts)
            d_s = t1 - alpha * seg[batch.dst]
            d_z = d_s * np.where(hc["z"] > 0, 1.0, cfg.leaky_slope)
            a1, a2, a3 = head.a[:dh], head.a[dh : 2 * dh], head.a[2 * dh :]
            name = f"layer{li}.head{hi}"
            grads[f"{name}.a"][:dh] = d_z @ wh[batch.src]
            grads[f"{name}.a"][dh : 2 * dh] = d_z @ wh[batch.dst]
            grads[f"{name}.a"][2 * dh :] = d_z @ hc["w2e"]
            np.add.at(d_wh, batch.src, np.outer(d_z, a1))
            np.add.at(d_wh, batch.dst, np.outer(d_z, a2))
            grads[f"{name}.W2"][:] = batch.edge_x.T @ np.outer(d_z, a3)
            grads[f"{name}.W"][:] = h_in.T @ d_wh
            d_h_in += d_wh @ head.W.T
        d_h = d_h_in
    return grads


def _class_weights(batch: GraphBatch, cfg: GatConfig) -> np.ndarray:
    y = batch.labels
    if cfg.positive_class_weight is not None:
        w_pos = cfg.positive_class_weight
    else:
        n_pos = y.sum()
        w_pos = (y.shape[0] - n_pos) / n_pos if n_pos > 0 else 1.0
    return np.where(y > 0.5, w_pos, 1.0)


def attention_scores(
    params: GatParameters, cfg: GatConfig, batch: GraphBatch, layer: int, head: int
) -> np.ndarray:
    """Normalized attention per edge (sorted-edge order, self-loops included)."""
    _, _, cache = _forward(params, cfg, batch)
    return cache["layers"][layer]["heads"][head]["alpha"]


def layer_forward(
    params: GatParameters, cfg: GatConfig, batch: GraphBatch, layer: int
) -> np.ndarray:
    """Node features after the given layer (0-based)."""
    _, _, cache = _forward(params, cfg, batch)
    layers = cache["layers"]
    if layer == cfg.layers - 1:
        return cache["h_final"]
    return layers[layer + 1]["h_in"]


def edge_predict(params: GatParameters, cfg: GatConfig, batch: GraphBatch) -> np.ndarray:
    """Holding probability per flight, in original record order."""
    _, logits, _ = _forward(params, cfg, batch)
    return 1.0 / (1.0 + np.exp(-logits))


def train(
    batch: GraphBatch, cfg: GatConfig, params: GatParameters | None = None
) -> tuple[GatParameters, list[float]]:
    """Full-batch gradient descent on class-weighted BCE.

    Returns the trained parameters and the loss trace (entry 0 is the loss
    before any update; one entry after each epoch).
    """
    if batch.n_flights == 0:
        raise AirholdError("batch has no flights")
    if batch.node_x.shape[1] != cfg.node_dim:
        raise AirholdError(
            f"batch node dim {batch.node_x.shape[1]} != config node_dim {cfg.node_dim}"
        )
    params = params or init_params(cfg, batch.edge_dim)
    y = batch.labels
    w = _class_weights(batch, cfg)
    trace = []
    for epoch in range(cfg.epochs):
        _, logits, cache = _forward(params, cfg, batch)
        loss = _loss_from_logits(logits, y, w)
        if not math.isfinite(loss):
            raise DivergenceError(epoch)
        trace.append(loss)
        grads = _backward(params, cfg, batch, cache, logits)
        for name, tensor in params.named_tensors():
            tensor -= cfg.learning_rate * grads[name]
    _, logits, _ = _forward(params, cfg, batch)
    final = _loss_from_logits(logits, y, w)
    if not math.isfinite(final):
        raise DivergenceError(cfg.epochs)
    trace.append(final)
    return params, trace


def gradient_check(
    batch: GraphBatch, cfg: GatConfig, params: GatParameters, epsilon: float = 1e-5
) -> float:
    """Max relative error of analytic vs central-difference gradients."""
    y = batch.labels
    w = _class_weights(batch, cfg)
    _, logits, cache = _forward(params, cfg, batch)
    grads = _backward(params, cfg, batch, cache, logits)

    worst = 0.0
    for name, tensor in params.named_tensors():
        flat = tensor.reshape(-1)
        g_flat = grads[name].reshape(-1)
        for i in range(flat.shape[0]):
            keep = flat[i]
            flat[i] = keep + epsilon
            _, lg, _ = _forward(params, cfg, batch)
            lo_plus = _loss_from_logits(lg, y, w)
            flat[i] = keep - epsilon
            _, lg, _ = _forward(params, cfg, batch)
            lo_minus = _loss_from_logits(lg, y, w)
            flat[i] = keep
            numeric = (lo_plus - lo_minus) / (2.0 * epsilon)
            denom = max(abs(g_flat[i]) + abs(numeric), 1e-8)
            worst = max(worst, abs(g_flat[i] - numeric) / denom)
    return worst


def save_params(params: GatParameters, cfg: GatConfig) -> str:
    payload = {
        "version": PARAMS_FORMAT_VERSION,
        "config": {
            "layers": cfg.layers,
            "heads": cfg.heads,
            "node_dim": cfg.node_dim,
            "hidden_dim": cfg.hidden_dim,
            "leaky_slope": cfg.leaky_slope,
            "positive_class_weight": cfg.positive_class_weight,
            "learning_rate": cfg.learning_rate,
            "epochs": cfg.epochs,
            "seed": cfg.seed,
        },
        "tensors": {name: t.tolist() for name, t in params.named_tensors()},
    }
    return json.dumps(payload, sort_keys=True) + "\n"


def load_params(text: str | bytes) -> tuple[GatParameters, GatConfig]:
    try:
        payload = json.loads(text)
        version = payload["version"]
    except (json.JSONDecodeError, KeyError, TypeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"corrupt parameter payload: {exc}") from None
    if version != PARAMS_FORMAT_VERSION:
        raise ModelVersionError(f"unsupported parameter version {version!r}")
    try:
        cfg = GatConfig(**payload["config"])
        tensors = {k: np.array(v) for k, v in payload["tensors"].items()}
        edge_dim = tensors["layer0.head0.W2"].shape[0]
        params = init_params(cfg, edge_dim)
        for name, t in params.named_tensors():
            t[:] = tensors[name]
        return params, cfg
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupt parameter payload: {exc}") from None
