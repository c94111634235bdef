"""Flight records: schema, CSV parsing, synthesis, and splitting.

The CSV schema here is the repository's canonical flight-record format.
Parsing is strict: rows that fail validation are rejected with row-numbered
diagnostics, never imputed. The synthetic generator produces datasets with
the production class ratio and a planted, recoverable signal (poor
visibility, strong wind, runway changes, and congested routes drive the
positive class), so end-to-end tests can assert directional behavior.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import RowError, SchemaError, SplitError

__all__ = [
    "FlightRecord",
    "Dataset",
    "CSV_COLUMNS",
    "parse_records",
    "serialize_records",
    "geodesic_km",
    "synth_generate",
    "stratified_split",
]

EARTH_RADIUS_KM = 6371.0088

CSV_COLUMNS = (
    "origin",
    "destination",
    "flight_hour",
    "wind_dir_deg",
    "wind_speed_kt",
    "visibility_m",
    "temperature_c",
    "cloud_cover_octas",
    "fc_wind_dir_deg",
    "fc_wind_speed_kt",
    "fc_visibility_m",
    "fc_temperature_c",
    "lat_src",
    "lon_src",
    "alt_src_m",
    "lat_dst",
    "lon_dst",
    "alt_dst_m",
    "runway_head_change",
    "runway_config_change",
    "holding",
    "holding_seconds",
)


def geodesic_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance (haversine, mean Earth radius 6371.0088 km)."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dphi = math.radians(lat2 - lat1)
    dlam = math.radians(lon2 - lon1)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


@dataclass(frozen=True)
class FlightRecord:
    """One flight with weather/geo/runway inputs plus the two holding labels."""

    origin: str
    destination: str
    flight_hour: int
    wind_dir_deg: float
    wind_speed_kt: float
    visibility_m: float
    temperature_c: float
    cloud_cover_octas: float
    fc_wind_dir_deg: float
    fc_wind_speed_kt: float
    fc_visibility_m: float
    fc_temperature_c: float
    lat_src: float
    lon_src: float
    alt_src_m: float
    lat_dst: float
    lon_dst: float
    alt_dst_m: float
    runway_head_change: bool
    runway_config_change: bool
    holding: bool
    holding_seconds: float
    geodesic_km: float = field(default=-1.0)  # derived; filled in __post_init__

    def __post_init__(self):
        if self.geodesic_km < 0:
            object.__setattr__(
                self,
                "geodesic_km",
                geodesic_km(self.lat_src, self.lon_src, self.lat_dst, self.lon_dst),
            )

    def validate(self, row: int = -1):
        def fail(name, msg):
            raise RowError(row, name, msg)

        if self.origin == self.destination:
            fail("destination", "origin equals destination (self-loop flight)")
        if not 0 <= self.flight_hour <= 23:
            fail("flight_hour", f"{self.flight_hour} outside 0-23")
        for name in ("wind_dir_deg", "fc_wind_dir_deg"):
            v = getattr(self, name)
            if not 0.0 <= v <= 360.0:
                fail(name, f"{v} outside 0-360")
        for name in ("wind_speed_kt", "fc_wind_speed_kt", "visibility_m", "fc_visibility_m"):
            if getattr(self, name) < 0.0:
                fail(name, f"{getattr(self, name)} is negative")
        for name in ("cloud_cover_octas",):
            v = getattr(self, name)
            if not 0.0 <= v <= 8.0:
                fail(name, f"{v} outside 0-8")
        for end in ("src", "dst"):
            lat = getattr(self, f"lat_{end}")
            lon = getattr(self, f"lon_{end}")
            alt = getattr(self, f"alt_{end}_m")
            if not -90.0 <= lat <= 90.0:
                fail(f"lat_{end}", f"{lat} outside [-90, 90]")
            if not -180.0 <= lon <= 180.0:
                fail(f"lon_{end}", f"{lon} outside [-180, 180]")
            if alt < -430.0:
                fail(f"alt_{end}_m", f"{alt} below -430 m")
        if self.holding_seconds < 0.0:
            fail("holding_seconds", f"{self.holding_seconds} is negative")
        if not self.holding and self.holding_seconds != 0.0:
            fail("holding_seconds", "nonzero duration on a non-holding flight")
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                fail(f.name, "non-finite value")


@dataclass
class Dataset:
    """Immutable record collection with provenance bookkeeping."""

    records: list[FlightRecord]
    provenance: dict

    @property
    def positives(self) -> int:
        return sum(r.holding for r in self.records)

    def __len__(self):
        return len(self.records)


def _parse_bool(raw: str, row: int, name: str) -> bool:
    if raw == "0":
        return False
    if raw == "1":
        return True
    raise RowError(row, name, f"expected 0 or 1, got {raw!r}")


def parse_records(csv_bytes: bytes) -> Dataset:
    """Parse and validate the canonical CSV; no imputation, strict ranges.

    The first failing row raises RowError with its 1-based data row number
    and offending field; a wrong header raises SchemaError.
    """
    text = csv_bytes.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty file") from None
    if tuple(header) != CSV_COLUMNS:
        missing = set(CSV_COLUMNS) - set(header)
        extra = set(header) - set(CSV_COLUMNS)
        detail = []
        if missing:
            detail.append(f"missing columns {sorted(missing)}")
        if extra:
            detail.append(f"unexpected columns {sorted(extra)}")
        if not detail:
            detail.append("columns out of order")
        raise SchemaError("bad header: " + "; ".join(detail))

    records: list[FlightRecord] = []
    for row_num, row in enumerate(reader, start=1):
        if not row:
            continue
        if len(row) != len(CSV_COLUMNS):
            raise RowError(row_num, "-", f"expected {len(CSV_COLUMNS)} fields, got {len(row)}")
        vals = dict(zip(CSV_COLUMNS, row))
        for name, raw in vals.items():
            if raw == "":
                raise RowError(row_num, name, "missing value")
        try:
            rec = FlightRecord(
                origin=vals["origin"],
                destination=vals["destination"],
                flight_hour=int(vals["flight_hour"]),
                wind_dir_deg=float(vals["wind_dir_deg"]),
                wind_speed_kt=float(vals["wind_speed_kt"]),
                visibility_m=float(vals["visibility_m"]),
                temperature_c=float(vals["temperature_c"]),
                cloud_cover_octas=float(vals["cloud_cover_octas"]),
                fc_wind_dir_deg=float(vals["fc_wind_dir_deg"]),
                fc_wind_speed_kt=float(vals["fc_wind_speed_kt"]),
                fc_visibility_m=float(vals["fc_visibility_m"]),
                fc_temperature_c=float(vals["fc_temperature_c"]),
                lat_src=float(vals["lat_src"]),
                lon_src=float(vals["lon_src"]),
                alt_src_m=float(vals["alt_src_m"]),
                lat_dst=float(vals["lat_dst"]),
                lon_dst=float(vals["lon_dst"]),
                alt_dst_m=float(vals["alt_dst_m"]),
                runway_head_change=_parse_bool(vals["runway_head_change"], row_num, "runway_head_change"),
                runway_config_change=_parse_bool(vals["runway_config_change"], row_num, "runway_config_change"),
                holding=_parse_bool(vals["holding"], row_num, "holding"),
                holding_seconds=float(vals["holding_seconds"]),
            )
        except ValueError as exc:
            raise RowError(row_num, "-", f"unparseable numeric field: {exc}") from None
        rec.validate(row_num)
        records.append(rec)

    pos = sum(r.holding for r in records)
    return Dataset(records, {"source": "parsed", "counts": {"total": len(records), "positives": pos, "negatives": len(records) - pos}})


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_records(ds: Dataset) -> bytes:
    """Canonical CSV bytes; floats use repr so parse -> serialize round-trips."""
    lines = [",".join(CSV_COLUMNS)]
    for r in ds.records:
        lines.append(",".join(_fmt(getattr(r, c)) for c in CSV_COLUMNS))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _airport_codes(count: int) -> list[str]:
    # ICAO-like: SB prefix plus two letters
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    codes = []
    for i in range(count):
        codes.append("SB" + letters[i // 26] + letters[i % 26])
    return codes


def synth_generate(
    seed: int, n: int = 42336, positives: int = 720, airports: int = 20
) -> Dataset:
    """Deterministic synthetic dataset with exactly `positives` holding flights.

    Holding is sampled without replacement proportional to exp(score) where
    the score rewards low visibility, strong wind, runway changes, and
    congested routes; that keeps the label rare but recoverable from the
    features. Positive durations are log-normal with median about 600 s.
    """
    if not 0 < positives < n:
        raise ValueError(f"positives must be in (0, {n})")
    if airports < 2:
        raise ValueError("need at least 2 airports")

    rng = np.random.default_rng(seed)
    codes = _airport_codes(airports)
    lat = rng.uniform(-33.0, 4.0, size=airports)
    lon = rng.uniform(-73.0, -35.0, size=airports)
    alt = rng.uniform(0.0, 1200.0, size=airports)

    # route popularity: heavy-tailed so a handful of city pairs dominate
    pairs = [(i, j) for i in range(airports) for j in range(airports) if i != j]
    popularity = rng.lognormal(mean=0.0, sigma=1.3, size=len(pairs))
    popularity /= popularity.sum()
    route_idx = rng.choice(len(pairs), size=n, p=popularity)
    src = np.array([pairs[k][0] for k in route_idx])
    dst = np.array([pairs[k][1] for k in route_idx])
    congestion = popularity[route_idx] / popularity.max()

    flight_hour = rng.integers(0, 24, size=n)
    wind_dir = rng.uniform(0.0, 360.0, size=n)
    wind_speed = rng.gamma(shape=2.0, scale=5.0, size=n)
    visibility = 10000.0 * rng.beta(2.5, 1.0, size=n)
    temperature = rng.normal(22.0, 6.0, size=n)
    clouds = rng.integers(0, 9, size=n)
    fc_wind_dir = np.mod(wind_dir + rng.normal(0.0, 20.0, size=n), 360.0)
    fc_wind_speed = np.maximum(0.0, wind_speed + rng.normal(0.0, 2.0, size=n))
    fc_visibility = np.clip(visibility + rng.normal(0.0, 800.0, size=n), 0.0, 10000.0)
    fc_temperature = temperature + rng.normal(0.0, 1.5, size=n)
    head_change = rng.random(n) < 0.08
    config_change = rng.random(n) < 0.05

    # planted drivers of holding, on a logit scale
    score = (
        3.5 * (10000.0 - visibility) / 10000.0
        + 1.8 * np.minimum(wind_speed, 40.0) / 20.0
        + 1.4 * head_change
        + 0.9 * config_change
        + 2.2 * congestion
    )
    gumbel = rng.gumbel(size=n)
    holding = np.zeros(n, dtype=bool)
    holding[np.argsort(-(score + gumbel))[:positives]] = True
    seconds = np.zeros(n)
    seconds[holding] = rng.lognormal(mean=math.log(600.0), sigma=0.8, size=positives)

    records = []
    for i in range(n):
        records.append(
            FlightRecord(
                origin=codes[src[i]],
                destination=codes[dst[i]],
                flight_hour=int(flight_hour[i]),
                wind_dir_deg=float(wind_dir[i]),
                wind_speed_kt=float(wind_speed[i]),
                visibility_m=float(visibility[i]),
                temperature_c=float(temperature[i]),
                cloud_cover_octas=float(clouds[i]),
                fc_wind_dir_deg=float(fc_wind_dir[i]),
                fc_wind_speed_kt=float(fc_wind_speed[i]),
                fc_visibility_m=float(fc_visibility[i]),
                fc_temperature_c=float(fc_temperature[i]),
                lat_src=float(lat[src[i]]),
                lon_src=float(lon[src[i]]),
                alt_src_m=float(alt[src[i]]),
                lat_dst=float(lat[dst[i]]),
                lon_dst=float(lon[dst[i]]),
                alt_dst_m=float(alt[dst[i]]),
                runway_head_change=bool(head_change[i]),
                runway_config_change=bool(config_change[i]),
                holding=bool(holding[i]),
                holding_seconds=float(seconds[i]),
            )
        )
    return Dataset(
        records,
        {
            "source": "synthetic",
            "seed": seed,
            "counts": {"total": n, "positives": positives, "negatives": n - positives},
        },
    )


def stratified_split(
    ds: Dataset, test_fraction: float = 0.2, seed: int = 0
) -> tuple[Dataset, Dataset]:
    """Class-stratified train/test split, reproducible from the seed."""
    if not 0.0 < test_fraction < 1.0:
        raise SplitError(f"test_fraction {test_fraction} outside (0, 1)")
    rng = np.random.default_rng(seed)
    pos_idx = [i for i, r in enumerate(ds.records) if r.holding]
    neg_idx = [i for i, r in enumerate(ds.records) if not r.holding]

    test_idx: list[int] = []
    train_idx: list[int] = []
    for cls_idx in (neg_idx, pos_idx):
        if not cls_idx:
            continue
        k = int(len(cls_idx) * test_fraction + 0.5)
        if len(cls_idx) >= 2 and (k == 0 or k == len(cls_idx)):
            raise SplitError(
                f"class of size {len(cls_idx)} would be empty on one side at fraction {test_fraction}"
            )
        perm = rng.permutation(len(cls_idx))
        test_idx.extend(cls_idx[i] for i in perm[:k])
        train_idx.extend(cls_idx[i] for i in perm[k:])

    def subset(idx: list[int], tag: str) -> Dataset:
        idx = sorted(idx)
        recs = [ds.records[i] for i in idx]
        pos = sum(r.holding for r in recs)
        prov = dict(ds.provenance)
        prov["split"] = {"part": tag, "test_fraction": test_fraction, "seed": seed}
        prov["counts"] = {"total": len(recs), "positives": pos, "negatives": len(recs) - pos}
        return Dataset(recs, prov)

    return subset(train_idx, "train"), subset(test_idx, "test")
