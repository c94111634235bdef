"""Gradient-boosted decision trees, from scratch on numpy.

Second-order (Newton) boosting with exact greedy split search: per round a
depth-limited regression tree is fit to the loss gradients, leaf values are
-sum(g)/(sum(h)+lambda), and split gain is the usual
0.5*(GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)). Classification uses weighted
logistic loss (the positive-class weight is how the rare holding class gets
traction); regression uses squared error.

Everything is deterministic: features are scanned in index order, candidate
thresholds in ascending order, and a new best split must be strictly better,
so gain ties resolve to the lowest feature index and lowest threshold. The
split scan runs as a jitted kernel over per-feature presorted row arrays
(columns are sorted once per training and children inherit the order via a
stable partition), which keeps 200 rounds on the 42k-row dataset around ten
seconds instead of minutes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import AirholdError, ModelFormatError, ModelVersionError
from .features import FeatureMatrix

__all__ = [
    "TreeNode",
    "TrainConfig",
    "GbdtModel",
    "train_classifier",
    "train_regressor",
    "predict",
    "predict_many",
    "feature_importance",
    "save_model",
    "load_model",
]

MODEL_FORMAT_VERSION = "airhold-gbdt-v1"


@dataclass
class TreeNode:
    """Internal node (feature_index/threshold/children) or leaf (value)."""

    feature_index: int = -1
    threshold: float = 0.0
    gain: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature_index < 0


@dataclass
class TrainConfig:
    rounds: int = 200
    max_depth: int = 6
    learning_rate: float = 0.1
    min_samples_leaf: int = 20
    class_weight_positive: float | None = None  # None: N_neg / N_pos
    lambda_l2: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.rounds < 0 or self.max_depth < 1 or self.learning_rate <= 0:
            raise AirholdError("rounds/max_depth/learning_rate out of range")
        if self.min_samples_leaf < 1 or self.lambda_l2 < 0:
            raise AirholdError("min_samples_leaf/lambda_l2 out of range")
        if self.class_weight_positive is not None and self.class_weight_positive <= 0:
            raise AirholdError("class_weight_positive must be positive")


@dataclass
class GbdtModel:
    task: str  # "classification" | "regression"
    base_score: float
    learning_rate: float
    feature_names: list[str]
    trees: list[TreeNode]
    loss_trace: list[float] = field(default_factory=list, repr=False)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _bce(margins: np.ndarray, y: np.ndarray, w: np.ndarray) -> float:
    # softplus(z) - y*z, computed stably from logits
    sp = np.maximum(margins, 0.0) + np.log1p(np.exp(-np.abs(margins)))
    return float(np.sum(w * (sp - y * margins)) / np.sum(w))


@njit(cache=True)
def _scan_level(order, xt, g, h, starts, ends, min_leaf, lam):
    """Exact greedy split search for every node segment of one tree level.

    `order` holds active row ids grouped by node and sorted by feature value
    within each node (one row per feature). Candidates are midpoints between
    distinct consecutive values; a candidate replaces the incumbent only
    when strictly better, so ties resolve to the lowest feature index and
    then the lowest threshold.
    """
    p = order.shape[0]
    k = starts.shape[0]
    best_gain = np.full(k, -np.inf)
    best_feat = np.full(k, -1, np.int64)
    best_thr = np.zeros(k)
    for j in range(p):
        for s in range(k):
            lo, hi = starts[s], ends[s]
            if hi - lo < 2 * min_leaf:
                continue
            gt = 0.0
            ht = 0.0
            for i in range(lo, hi):
                r = order[j, i]
                gt += g[r]
                ht += h[r]
            parent = gt * gt / (ht + lam)
            gl = 0.0
            hl = 0.0
            for i in range(lo, hi - 1):
                r = order[j, i]
                gl += g[r]
                hl += h[r]
                cnt_l = i - lo + 1
                if cnt_l < min_leaf or hi - lo - cnt_l < min_leaf:
                    continue
                x0 = xt[j, r]
                x1 = xt[j, order[j, i + 1]]
                if x1 <= x0:
                    continue
                gr = gt - gl
                hr = ht - hl
                gain = 0.5 * (gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent)
                if gain > best_gain[s]:
                    best_gain[s] = gain
                    best_feat[s] = j
                    best_thr[s] = 0.5 * (x0 + x1)
    return best_gain, best_feat, best_thr


@njit(cache=True)
def _partition_level(order, side, n_left, n_right):
    """Stable split of each feature's row ordering into [lefts..., rights...]."""
    p, m = order.shape
    out = np.empty((p, n_left + n_right), order.dtype)
    for j in range(p):
        li = 0
        ri = n_left
        for i in range(m):
            r = order[j, i]
            sd = side[r]
            if sd == 0:
                out[j, li] = r
                li += 1
            elif sd == 1:
                out[j, ri] = r
                ri += 1
    return out


class _TreeGrower:
    """Level-wise exact greedy growth over per-feature presorted row arrays.

    Node segments are identical across features, so one kernel call scans a
    whole level; children inherit the parent's within-node value ordering
    through a stable partition, so columns are sorted once per training.
    """

    def __init__(self, X: np.ndarray, sort_idx: np.ndarray, cfg: TrainConfig):
        self.X = X
        self.xt = np.ascontiguousarray(X.T)
        self.base_order = np.ascontiguousarray(sort_idx.T)  # (p, n)
        self.cfg = cfg

    def grow(self, g: np.ndarray, h: np.ndarray) -> tuple[TreeNode, np.ndarray]:
        """Fit one tree to gradients; returns (root, per-row leaf values)."""
        n, p = self.X.shape
        cfg = self.cfg
        lam = cfg.lambda_l2
        row_value = np.zeros(n)
        side = np.empty(n, dtype=np.int8)  # scratch: 0 left, 1 right, 2 settled

        def settle(node: TreeNode, rows: np.ndarray):
            value = -g[rows].sum() / (h[rows].sum() + lam)
            node.value = float(value)
            row_value[rows] = value
            side[rows] = 2

        root = TreeNode()
        order = self.base_order  # (p, m) active rows, x-sorted within node segments
        level: list[tuple[TreeNode, np.ndarray]] = [(root, np.arange(n))]

        for _depth in range(cfg.max_depth):
            counts = np.array([len(rows) for _, rows in level], dtype=np.int64)
            ends = np.cumsum(counts)
            starts = ends - counts
            best_gain, best_feat, best_thr = _scan_level(
                order, self.xt, g, h, starts, ends, cfg.min_samples_leaf, lam
            )

            lefts: list[tuple[TreeNode, np.ndarray]] = []
            rights: list[tuple[TreeNode, np.ndarray]] = []
            for k, (node, rows) in enumerate(level):
                if not best_gain[k] > 0.0:
                    settle(node, rows)
                    continue
                node.feature_index = int(best_feat[k])
                node.threshold = float(best_thr[k])
                node.gain = float(best_gain[k])
                node.left = TreeNode()
                node.right = TreeNode()
                mask = self.X[rows, node.feature_index] < node.threshold
                side[rows] = np.where(mask, 0, 1)
                lefts.append((node.left, rows[mask]))
                rights.append((node.right, rows[~mask]))
            level = lefts + rights
            if not level:
                return root, row_value
            n_left = sum(len(r) for _, r in lefts)
            n_right = sum(len(r) for _, r in rights)
            order = _partition_level(order, side, n_left, n_right)

        for node, rows in level:
            settle(node, rows)
        return root, row_value


def _boost(
    X: np.ndarray,
    cfg: TrainConfig,
    base: float,
    grad_fn,
    loss_fn,
) -> tuple[list[TreeNode], list[float]]:
    sort_idx = np.argsort(X, axis=0, kind="stable").astype(np.int32)
    grower = _TreeGrower(X, sort_idx, cfg)
    margins = np.full(X.shape[0], base)
    trees: list[TreeNode] = []
    trace = [loss_fn(margins)]
    for _ in range(cfg.rounds):
        g, h = grad_fn(margins)
        root, row_value = grower.grow(g, h)
        margins = margins + cfg.learning_rate * row_value
        trees.append(root)
        trace.append(loss_fn(margins))
    return trees, trace


def train_classifier(matrix: FeatureMatrix, cfg: TrainConfig | None = None) -> GbdtModel:
    """Boosted classifier on weighted logistic loss."""
    cfg = cfg or TrainConfig()
    y = matrix.labels_cls.astype(float)
    n = y.shape[0]
    if n < 2:
        raise AirholdError("need at least 2 rows")
    n_pos = int(y.sum())
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise AirholdError("single-class labels: nothing to separate")
    w_pos = cfg.class_weight_positive if cfg.class_weight_positive is not None else n_neg / n_pos
    w = np.where(y > 0.5, w_pos, 1.0)
    base = math.log(w_pos * n_pos / n_neg)  # logit of the weighted positive rate

    def grad(margins):
        pv = _sigmoid(margins)
        return w * (pv - y), w * pv * (1.0 - pv)

    trees, trace = _boost(matrix.rows, cfg, base, grad, lambda f: _bce(f, y, w))
    return GbdtModel("classification", base, cfg.learning_rate, list(matrix.names), trees, trace)


def train_regressor(matrix: FeatureMatrix, cfg: TrainConfig | None = None) -> GbdtModel:
    """Boosted regressor on squared error; base score is the label mean."""
    cfg = cfg or TrainConfig()
    y = matrix.labels_reg.astype(float)
    if y.shape[0] < 2:
        raise AirholdError("need at least 2 rows")
    base = float(y.mean())

    def grad(margins):
        return margins - y, np.ones_like(margins)

    trees, trace = _boost(
        matrix.rows, cfg, base, grad, lambda f: float(np.mean((f - y) ** 2))
    )
    return GbdtModel("regression", base, cfg.learning_rate, list(matrix.names), trees, trace)


def _apply_tree(node: TreeNode, X: np.ndarray, idx: np.ndarray, out: np.ndarray):
    if node.is_leaf:
        out[idx] = node.value
        return
    mask = X[idx, node.feature_index] < node.threshold
    _apply_tree(node.left, X, idx[mask], out)
    _apply_tree(node.right, X, idx[~mask], out)


def _raw_scores(model: GbdtModel, X: np.ndarray) -> np.ndarray:
    scores = np.full(X.shape[0], model.base_score)
    buf = np.zeros(X.shape[0])
    idx = np.arange(X.shape[0])
    for tree in model.trees:
        _apply_tree(tree, X, idx, buf)
        scores += model.learning_rate * buf
    return scores


def predict_many(model: GbdtModel, X: np.ndarray) -> np.ndarray:
    """Vectorized predict; probabilities for classification, >= 0 for delays."""
    if X.ndim != 2 or X.shape[1] != len(model.feature_names):
        raise AirholdError(
            f"feature dimension mismatch: got {X.shape[1] if X.ndim == 2 else 'non-2d'}, "
            f"expected {len(model.feature_names)}"
        )
    raw = _raw_scores(model, X)
    if model.task == "classification":
        return _sigmoid(raw)
    return np.maximum(raw, 0.0)


def predict(model: GbdtModel, x: np.ndarray) -> float:
    return float(predict_many(model, np.asarray(x, dtype=float).reshape(1, -1))[0])


def feature_importance(model: GbdtModel) -> dict[str, float]:
    """Split gain accumulated per feature, normalized to sum 1."""
    totals = np.zeros(len(model.feature_names))

    def walk(node: TreeNode):
        if node.is_leaf:
            return
        totals[node.feature_index] += node.gain
        walk(node.left)
        walk(node.right)

    for tree in model.trees:
        walk(tree)
    total = totals.sum()
    if total <= 0.0:
        raise AirholdError("model has no splits; train it first")
    return {name: float(totals[i] / total) for i, name in enumerate(model.feature_names)}


def _node_to_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"value": node.value}
    return {
        "feature_index": node.feature_index,
        "threshold": node.threshold,
        "gain": node.gain,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(d: dict) -> TreeNode:
    if "value" in d:
        return TreeNode(value=float(d["value"]))
    return TreeNode(
        feature_index=int(d["feature_index"]),
        threshold=float(d["threshold"]),
        gain=float(d["gain"]),
        left=_node_from_dict(d["left"]),
        right=_node_from_dict(d["right"]),
    )


def save_model(model: GbdtModel) -> str:
    payload = {
        "version": MODEL_FORMAT_VERSION,
        "task": model.task,
        "base_score": model.base_score,
        "learning_rate": model.learning_rate,
        "feature_names": model.feature_names,
        "trees": [_node_to_dict(t) for t in model.trees],
    }
    return json.dumps(payload, sort_keys=True) + "\n"


def load_model(text: str | bytes) -> GbdtModel:
    try:
        payload = json.loads(text)
        version = payload["version"]
    except (json.JSONDecodeError, KeyError, TypeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"corrupt model payload: {exc}") from None
    if version != MODEL_FORMAT_VERSION:
        raise ModelVersionError(f"unsupported model version {version!r}")
    try:
        return GbdtModel(
            task=payload["task"],
            base_score=float(payload["base_score"]),
            learning_rate=float(payload["learning_rate"]),
            feature_names=list(payload["feature_names"]),
            trees=[_node_from_dict(t) for t in payload["trees"]],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupt model payload: {exc}") from None
