import numpy as np
import pytest

from airhold.graph import AirportNode, WeightedDigraph


def make_graph(weights: dict[tuple[str, str], int]) -> WeightedDigraph:
    """Digraph from a weight map; nodes get placeholder coordinates."""
    codes = sorted({c for e in weights for c in e})
    nodes = [AirportNode(c, 0.0, float(i), 0.0) for i, c in enumerate(codes)]
    return WeightedDigraph(nodes, weights)


def random_graph(rng: np.random.Generator, n: int, p: float = 0.4, max_w: int = 5) -> WeightedDigraph:
    codes = [chr(ord("a") + i) for i in range(n)]
    weights = {}
    for u in codes:
        for v in codes:
            if u != v and rng.random() < p:
                weights[(u, v)] = int(rng.integers(1, max_w + 1))
    nodes = [AirportNode(c, 0.0, float(i), 0.0) for i, c in enumerate(codes)]
    return WeightedDigraph(nodes, weights)


@pytest.fixture(scope="session")
def small_dataset():
    from airhold.records import synth_generate

    return synth_generate(seed=11, n=2400, positives=120, airports=8)


@pytest.fixture(scope="session")
def small_split(small_dataset):
    from airhold.records import stratified_split

    return stratified_split(small_dataset, 0.2, seed=11)


@pytest.fixture(scope="session")
def trained_snapshot(small_split):
    """Small but real end-to-end snapshot shared by service/CLI tests."""
    from airhold.features import (
        GraphFeatureIndex,
        attach_graph_features,
        build_matrix,
        default_registry,
    )
    from airhold.gbdt import TrainConfig, train_classifier, train_regressor
    from airhold.service import ModelSnapshot

    train, test = small_split
    registry = default_registry()
    index = GraphFeatureIndex(train.records)
    train_matrix = build_matrix(attach_graph_features(train.records, train.records, index), registry)
    cfg = TrainConfig(rounds=40, seed=11)
    snapshot = ModelSnapshot(
        classifier=train_classifier(train_matrix, cfg),
        regressor=train_regressor(train_matrix, cfg),
        registry=registry,
        index=index,
        versions={"classifier": "test", "regressor": "test"},
    )
    return snapshot, train, test, train_matrix
