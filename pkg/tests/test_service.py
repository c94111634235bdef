import numpy as np
import pytest
from fastapi.testclient import TestClient

from airhold.features import attach_graph_features, build_matrix
from airhold.gbdt import predict_many
from airhold.service import create_app
from helpers import scenario_payload as scenario_from_record


@pytest.fixture(scope="module")
def client(trained_snapshot):
    snapshot, _, _, _ = trained_snapshot
    return TestClient(create_app(snapshot))


class TestEndpoints:
    def test_health(self, client):
        res = client.get("/health")
        assert res.status_code == 200
        body = res.json()
        assert body["status"] == "ok" and "model_versions" in body

    def test_network_shape(self, client, trained_snapshot):
        snapshot = trained_snapshot[0]
        res = client.get("/network")
        assert res.status_code == 200
        body = res.json()
        assert len(body["nodes"]) == len(snapshot.index.digraph.nodes)
        assert len(body["edges"]) == len(snapshot.index.digraph.weights)
        for e in body["edges"]:
            assert set(e) == {"src", "dst", "weight", "features"}

    def test_importances(self, client):
        body = client.get("/importances").json()
        assert sum(body["classifier"].values()) == pytest.approx(1.0, abs=1e-9)

    def test_predict_deterministic(self, client, trained_snapshot):
        _, train, _, _ = trained_snapshot
        payload = scenario_from_record(train.records[0], request_id="abc")
        r1 = client.post("/predict", json=payload)
        r2 = client.post("/predict", json=payload)
        assert r1.status_code == 200
        assert r1.json() == r2.json()
        assert r1.json()["request_id"] == "abc"
        assert 0.0 <= r1.json()["holding_probability"] <= 1.0
        assert r1.json()["predicted_delay_s"] >= 0.0

    def test_unknown_airport_422(self, client, trained_snapshot):
        _, train, _, _ = trained_snapshot
        payload = scenario_from_record(train.records[0])
        payload["origin"] = "XXXX"
        assert client.post("/predict", json=payload).status_code == 422

    def test_out_of_range_field_422(self, client, trained_snapshot):
        _, train, _, _ = trained_snapshot
        payload = scenario_from_record(train.records[0])
        payload["wind_dir_deg"] = 400.0
        res = client.post("/predict", json=payload)
        assert res.status_code == 422

    def test_malformed_json_400(self, client):
        res = client.post("/predict", content=b"{not json", headers={"Content-Type": "application/json"})
        assert res.status_code == 400

    def test_simulate_matches_pointwise_predict(self, client, trained_snapshot):
        _, train, _, _ = trained_snapshot
        payloads = [scenario_from_record(r) for r in train.records[:5]]
        batch = client.post("/simulate", json=payloads).json()
        singles = [client.post("/predict", json=p).json() for p in payloads]
        assert batch == singles

    def test_simulate_batch_cap(self, client, trained_snapshot):
        _, train, _, _ = trained_snapshot
        payload = scenario_from_record(train.records[0])
        res = client.post("/simulate", json=[payload] * 10_001)
        assert res.status_code == 413

    def test_concurrent_identical_requests_identical_responses(self, client, trained_snapshot):
        from concurrent.futures import ThreadPoolExecutor

        _, train, _, _ = trained_snapshot
        payload = scenario_from_record(train.records[0])
        with ThreadPoolExecutor(max_workers=16) as pool:
            bodies = list(pool.map(lambda _: client.post("/predict", json=payload).json(), range(200)))
        assert all(b == bodies[0] for b in bodies)


class TestPathEquivalence:
    def test_predict_equals_batch_pipeline(self, client, trained_snapshot):
        snapshot, train, test, _ = trained_snapshot
        recs = test.records[:8]
        augmented = attach_graph_features(train.records, recs, snapshot.index)
        m = build_matrix(augmented, snapshot.registry)
        expected = predict_many(snapshot.classifier, m.rows)
        for rec, want in zip(recs, expected):
            got = client.post("/predict", json=scenario_from_record(rec)).json()
            assert got["holding_probability"] == want

    def test_unseen_route_flagged(self, client, trained_snapshot):
        snapshot, train, _, _ = trained_snapshot
        codes = sorted(snapshot.index.digraph.nodes)
        unseen_pair = None
        for u in codes:
            for v in codes:
                if u != v and (u, v) not in snapshot.index.digraph.weights:
                    unseen_pair = (u, v)
                    break
            if unseen_pair:
                break
        if unseen_pair is None:
            pytest.skip("training graph is complete")
        payload = scenario_from_record(train.records[0])
        payload["origin"], payload["destination"] = unseen_pair
        body = client.post("/predict", json=payload).json()
        assert body["unseen_route"] is True
        assert body["graph_features_used"] is None

    def test_degraded_visibility_raises_probability(self, client, trained_snapshot):
        snapshot, train, _, _ = trained_snapshot
        # the busiest training route gives the model the most signal
        busiest = max(snapshot.index.digraph.weights, key=snapshot.index.digraph.weights.get)
        base = scenario_from_record(train.records[0])
        base["origin"], base["destination"] = busiest
        base["visibility_m"] = 9500.0
        base["fc_visibility_m"] = 9500.0
        base["wind_speed_kt"] = 5.0
        degraded = dict(base, visibility_m=250.0, fc_visibility_m=250.0)
        p_base = client.post("/predict", json=base).json()["holding_probability"]
        p_bad = client.post("/predict", json=degraded).json()["holding_probability"]
        assert p_bad > p_base
