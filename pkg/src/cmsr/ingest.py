"""Build instances from raw GPS occupancy traces.

Pipeline: pick-up extraction (vacant -> occupied transitions inside a daily
time window), DBSCAN on great-circle distance, per-cluster rate fitting from
same-day inter-event gaps, and a straight-line travel-time matrix.

The original CRAWDAD cab traces ship one whitespace-delimited file per taxi
(``lat lon occupied timestamp``); concatenate them into one CSV with a
``taxi_id`` column before ingesting.
"""

from __future__ import annotations

import csv
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from sklearn.cluster import DBSCAN

from .model import Instance, validate_instance
from .probability import estimate_rate

log = logging.getLogger(__name__)

EARTH_RADIUS_M = 6_371_008.8
TRACE_COLUMNS = ("taxi_id", "latitude", "longitude", "occupied", "timestamp")


@dataclass(frozen=True)
class TraceRecord:
    taxi_id: str
    lat: float
    lon: float
    occupied: bool
    timestamp: int

    def __post_init__(self):
        if not (-90 <= self.lat <= 90 and -180 <= self.lon <= 180):
            raise ValueError(f"coordinates out of range: {self.lat}, {self.lon}")


@dataclass(frozen=True)
class PickupEvent:
    lat: float
    lon: float
    timestamp: int


@dataclass(frozen=True)
class ClusterSpec:
    eps_m: float = 200.0
    min_pts: int = 5
    time_window: tuple[int, int] = (18 * 3600, 18 * 3600 + 1800)  # seconds of day, [start, end)

    def __post_init__(self):
        if self.eps_m <= 0:
            raise ValueError("eps_m must be positive")
        if self.min_pts < 1:
            raise ValueError("min_pts must be >= 1")
        if not self.time_window[0] < self.time_window[1]:
            raise ValueError("time window start must precede its end")


@dataclass
class Cluster:
    events: list[PickupEvent]
    lat: float
    lon: float

    @property
    def size(self) -> int:
        return len(self.events)


@dataclass
class ReadSummary:
    rows: int = 0
    skipped: int = 0
    reasons: dict[str, int] = field(default_factory=dict)


def haversine_m(lat1, lon1, lat2, lon2):
    """Great-circle distance in meters; accepts scalars or arrays."""
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dphi = p2 - p1
    dlmb = np.radians(lon2) - np.radians(lon1)
    a = np.sin(dphi / 2) ** 2 + np.cos(p1) * np.cos(p2) * np.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def read_traces(path: str | Path, summary: ReadSummary | None = None) -> list[TraceRecord]:
    """Parse a trace CSV; malformed rows are skipped and tallied in ``summary``."""
    summary = summary if summary is not None else ReadSummary()
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(TRACE_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"trace CSV missing columns: {sorted(missing)}")
        for row in reader:
            summary.rows += 1
            try:
                occ = row["occupied"].strip()
                if occ not in ("0", "1"):
                    raise ValueError("occupied must be 0 or 1")
                records.append(
                    TraceRecord(
                        taxi_id=row["taxi_id"],
                        lat=float(row["latitude"]),
                        lon=float(row["longitude"]),
                        occupied=occ == "1",
                        timestamp=int(row["timestamp"]),
                    )
                )
            except (TypeError, ValueError, AttributeError) as exc:
                summary.skipped += 1
                key = type(exc).__name__
                summary.reasons[key] = summary.reasons.get(key, 0) + 1
    if summary.skipped:
        log.warning("skipped %d of %d trace rows", summary.skipped, summary.rows)
    return records


def seconds_of_day(ts: int, utc_offset: int = 0) -> int:
    return (ts + utc_offset) % 86400


def day_of(ts: int, utc_offset: int = 0) -> date:
    return (datetime(1970, 1, 1, tzinfo=timezone.utc) + timedelta(seconds=ts + utc_offset)).date()


def extract_pickups(
    records: Iterable[TraceRecord],
    window: tuple[int, int],
    utc_offset: int = 0,
) -> list[PickupEvent]:
    """One event per vacant-to-occupied transition whose time of day lies in ``[start, end)``."""
    start, end = window
    by_taxi: dict[str, list[TraceRecord]] = defaultdict(list)
    for r in records:
        by_taxi[r.taxi_id].append(r)
    events = []
    for taxi in sorted(by_taxi):
        recs = sorted(by_taxi[taxi], key=lambda r: r.timestamp)
        for prev, cur in zip(recs, recs[1:]):
            if cur.occupied and not prev.occupied:
                if start <= seconds_of_day(cur.timestamp, utc_offset) < end:
                    events.append(PickupEvent(cur.lat, cur.lon, cur.timestamp))
    events.sort(key=lambda e: (e.timestamp, e.lat, e.lon))
    return events


def cluster_pickups(events: Sequence[PickupEvent], spec: ClusterSpec) -> list[Cluster]:
    """DBSCAN with the haversine metric; noise is dropped.

    Clusters come back largest first, ties broken by centroid latitude.
    """
    if not events:
        raise ValueError("need at least one pick-up event")
    coords = np.radians([[e.lat, e.lon] for e in events])
    labels = DBSCAN(
        eps=spec.eps_m / EARTH_RADIUS_M,
        min_samples=spec.min_pts,
        metric="haversine",
        algorithm="ball_tree",
    ).fit_predict(coords)
    clusters = []
    for label in sorted(set(labels) - {-1}):
        members = [e for e, lab in zip(events, labels) if lab == label]
        lat = float(np.mean([e.lat for e in members]))
        lon = float(np.mean([e.lon for e in members]))
        clusters.append(Cluster(members, lat, lon))
    clusters.sort(key=lambda c: (-c.size, c.lat, c.lon))
    return clusters


def same_day_intervals(timestamps: Iterable[int], utc_offset: int = 0) -> list[int]:
    by_day: dict[date, list[int]] = defaultdict(list)
    for ts in timestamps:
        by_day[day_of(ts, utc_offset)].append(ts)
    gaps = []
    for day in sorted(by_day):
        ts = sorted(by_day[day])
        gaps.extend(b - a for a, b in zip(ts, ts[1:]))
    return gaps


def fit_rates(
    clusters: Sequence[Cluster],
    days: Iterable[date] | None = None,
    utc_offset: int = 0,
) -> dict[int, float]:
    """Per-cluster arrival rate from gaps between consecutive same-day events.

    ``days`` restricts the training data (leave-one-day-out evaluation);
    ``None`` uses every day. Clusters whose gaps cannot support an estimate
    are dropped with a warning. Keys are cluster positions in ``clusters``.
    """
    keep = None if days is None else set(days)
    rates = {}
    for i, cl in enumerate(clusters):
        ts = [
            e.timestamp
            for e in cl.events
            if keep is None or day_of(e.timestamp, utc_offset) in keep
        ]
        # simultaneous pickups give zero gaps, which carry no rate information
        gaps = [g for g in same_day_intervals(ts, utc_offset) if g > 0]
        try:
            rates[i] = estimate_rate(gaps)
        except ValueError:
            log.warning("dropping cluster %d: %d usable intervals", i, len(gaps))
    return rates


def build_travel_matrix(
    centroids: Sequence[tuple[float, float]],
    start: tuple[float, float],
    speed_mps: float,
) -> np.ndarray:
    """Integer seconds between every pair of locations; index 0 is ``start``."""
    if speed_mps <= 0:
        raise ValueError("speed must be positive")
    pts = np.array([start, *centroids], dtype=float)
    lat, lon = pts[:, 0], pts[:, 1]
    dist = haversine_m(lat[:, None], lon[:, None], lat[None, :], lon[None, :])
    return np.rint(dist / speed_mps).astype(np.int64)


def mean_off_diagonal(travel: np.ndarray) -> float:
    n = travel.shape[0]
    if n < 2:
        return 0.0
    return float(travel[~np.eye(n, dtype=bool)].mean())


def build_instance(
    records: Iterable[TraceRecord],
    spec: ClusterSpec,
    start: tuple[float, float],
    speed_mps: float,
    route_len: int,
    fleet: int,
    days: Iterable[date] | None = None,
    penalty: float | None = None,
    utc_offset: int = 0,
) -> tuple[Instance, dict]:
    """Full ingestion pipeline; returns the instance and a sidecar description."""
    events = extract_pickups(records, spec.time_window, utc_offset)
    clusters = cluster_pickups(events, spec)
    rates = fit_rates(clusters, days, utc_offset)
    kept = [i for i in range(len(clusters)) if i in rates]
    if not kept:
        raise ValueError("no cluster has enough events to estimate a rate")
    centroids = [(clusters[i].lat, clusters[i].lon) for i in kept]
    travel = build_travel_matrix(centroids, start, speed_mps)
    if penalty is None:
        penalty = round(mean_off_diagonal(travel))
    inst = validate_instance(
        Instance(
            n_points=len(kept),
            rates=[rates[i] for i in kept],
            travel=travel,
            penalty=penalty,
            route_len=route_len,
            fleet=fleet,
        )
    )
    sidecar = {
        "start": list(start),
        "speed_mps": speed_mps,
        "pickup_events": len(events),
        "clusters": [
            {"point": p, "lat": clusters[i].lat, "lon": clusters[i].lon, "size": clusters[i].size}
            for p, i in enumerate(kept, start=1)
        ],
        "dropped_clusters": len(clusters) - len(kept),
    }
    return inst, sidecar
