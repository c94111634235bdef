"""HTTP JSON service for interactive what-if predictions.

A single immutable snapshot (trained classifier + regressor, feature
registry, and the training-graph feature index) is loaded at startup and
shared read-only across requests; prediction is pure, so identical requests
always produce identical responses. Scenario rows are built through the
exact same encoding path as the batch pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .features import (
    AugmentedRecord,
    FeatureSpec,
    GraphFeatureIndex,
    build_matrix,
)
from .gbdt import GbdtModel, feature_importance, predict_many
from .records import FlightRecord

__all__ = ["ModelSnapshot", "ScenarioRequest", "create_app", "serve"]

SIMULATE_BATCH_CAP = 10_000


@dataclass(frozen=True)
class ModelSnapshot:
    classifier: GbdtModel
    regressor: GbdtModel
    registry: list[FeatureSpec]
    index: GraphFeatureIndex
    versions: dict[str, str]


class ScenarioRequest(BaseModel):
    """What-if scenario: a route plus conditions; labels are never inputs."""

    origin: str
    destination: str
    flight_hour: int = Field(ge=0, le=23)
    wind_dir_deg: float = Field(ge=0, le=360)
    wind_speed_kt: float = Field(ge=0)
    visibility_m: float = Field(ge=0)
    temperature_c: float
    cloud_cover_octas: float = Field(ge=0, le=8)
    fc_wind_dir_deg: float = Field(ge=0, le=360)
    fc_wind_speed_kt: float = Field(ge=0)
    fc_visibility_m: float = Field(ge=0)
    fc_temperature_c: float
    runway_head_change: bool = False
    runway_config_change: bool = False
    request_id: str | None = None


def _scenario_to_row(snapshot: ModelSnapshot, req: ScenarioRequest) -> np.ndarray | JSONResponse:
    airports = snapshot.index.digraph.nodes
    for code in (req.origin, req.destination):
        if code not in airports:
            return JSONResponse(status_code=422, content={"detail": f"unknown airport {code!r}"})
    if req.origin == req.destination:
        return JSONResponse(status_code=422, content={"detail": "origin equals destination"})
    a, b = airports[req.origin], airports[req.destination]
    record = FlightRecord(
        origin=req.origin,
        destination=req.destination,
        flight_hour=req.flight_hour,
        wind_dir_deg=req.wind_dir_deg,
        wind_speed_kt=req.wind_speed_kt,
        visibility_m=req.visibility_m,
        temperature_c=req.temperature_c,
        cloud_cover_octas=req.cloud_cover_octas,
        fc_wind_dir_deg=req.fc_wind_dir_deg,
        fc_wind_speed_kt=req.fc_wind_speed_kt,
        fc_visibility_m=req.fc_visibility_m,
        fc_temperature_c=req.fc_temperature_c,
        lat_src=a.lat,
        lon_src=a.lon,
        alt_src_m=a.altitude,
        lat_dst=b.lat,
        lon_dst=b.lon,
        alt_dst_m=b.altitude,
        runway_head_change=req.runway_head_change,
        runway_config_change=req.runway_config_change,
        holding=False,
        holding_seconds=0.0,
    )
    feats, unseen = snapshot.index.lookup(req.origin, req.destination)
    aug = AugmentedRecord(record, feats, unseen)
    return build_matrix([aug], snapshot.registry).rows[0]


def predict_scenario(snapshot: ModelSnapshot, req: ScenarioRequest) -> dict | JSONResponse:
    """Score one scenario through the batch feature path."""
    row = _scenario_to_row(snapshot, req)
    if isinstance(row, JSONResponse):
        return row
    feats, unseen = snapshot.index.lookup(req.origin, req.destination)
    prob = float(predict_many(snapshot.classifier, row.reshape(1, -1))[0])
    delay = float(predict_many(snapshot.regressor, row.reshape(1, -1))[0])
    return {
        "request_id": req.request_id,
        "holding_probability": prob,
        "predicted_delay_s": delay,
        "model_versions": snapshot.versions,
        "unseen_route": unseen,
        "graph_features_used": None
        if unseen
        else {
            "betweenness": feats.betweenness,
            "flow_betweenness": feats.flow_betweenness,
            "edge_connectivity": feats.edge_connectivity,
            "dd_src": feats.degree_diff_src,
            "dd_dst": feats.degree_diff_dst,
            "google_entry": feats.google_entry,
        },
    }


def create_app(snapshot: ModelSnapshot) -> FastAPI:
    app = FastAPI(title="airhold what-if service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        errors = exc.errors()
        # undecodable body is a malformed request, not a field-level failure
        if any(e.get("type") == "json_invalid" for e in errors):
            return JSONResponse(status_code=400, content={"detail": "malformed JSON body"})
        fields = [
            {"field": ".".join(str(p) for p in e.get("loc", [])[1:]), "message": e.get("msg", "")}
            for e in errors
        ]
        return JSONResponse(status_code=422, content={"detail": fields})

    @app.get("/health")
    def health():
        return {"status": "ok", "model_versions": snapshot.versions}

    @app.get("/network")
    def network():
        g = snapshot.index.digraph
        feats = snapshot.index.edge_features
        return {
            "nodes": [
                {
                    "code": n.code,
                    "lat": n.lat,
                    "lon": n.lon,
                    "alt": n.altitude,
                }
                for n in (g.nodes[c] for c in g.node_codes)
            ],
            "edges": [
                {
                    "src": u,
                    "dst": v,
                    "weight": g.weights[(u, v)],
                    "features": {
                        "betweenness": feats[(u, v)].betweenness,
                        "flow_betweenness": feats[(u, v)].flow_betweenness,
                        "edge_connectivity": feats[(u, v)].edge_connectivity,
                        "dd_src": feats[(u, v)].degree_diff_src,
                        "dd_dst": feats[(u, v)].degree_diff_dst,
                        "google_entry": feats[(u, v)].google_entry,
                    },
                }
                for u, v in sorted(g.weights)
            ],
        }

    @app.get("/importances")
    def importances():
        return {
            "classifier": feature_importance(snapshot.classifier),
            "regressor": feature_importance(snapshot.regressor),
        }

    @app.post("/predict")
    def predict_endpoint(req: ScenarioRequest):
        return predict_scenario(snapshot, req)

    @app.post("/simulate")
    def simulate_endpoint(reqs: list[ScenarioRequest]):
        if len(reqs) > SIMULATE_BATCH_CAP:
            return JSONResponse(
                status_code=413,
                content={"detail": f"batch of {len(reqs)} exceeds cap {SIMULATE_BATCH_CAP}"},
            )
        out = []
        for r in reqs:
            res = predict_scenario(snapshot, r)
            if isinstance(res, JSONResponse):
                return res
            out.append(res)
        return out

    return app


def serve(snapshot: ModelSnapshot, bind_addr: str = "127.0.0.1:8080"):
    """Run the service until interrupted."""
    import uvicorn

    host, _, port = bind_addr.partition(":")
    uvicorn.run(create_app(snapshot), host=host or "127.0.0.1", port=int(port or 8080))
