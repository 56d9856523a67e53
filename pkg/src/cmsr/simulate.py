"""Trace-driven replay of passenger arrivals against a recommendation.

A cruising taxi reaching point ``c`` at time ``t`` picks up iff some passenger
arrived at ``c`` in ``(last_visit[c], t]``. Any visit by a cruising taxi
clears the point, pickup or not. A taxi that has picked up stops and no
longer clears points further along its route. Simultaneous arrivals follow
route order, as in the analytic model.

Random streams come from numpy's PCG64 generator seeded per day.
"""

from __future__ import annotations

import bisect
import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .model import Instance, InstanceError, Recommendation, arrival_times

RNG_NAME = "numpy.random.PCG64"


class PassengerEvent(NamedTuple):
    point: int
    time: float


@dataclass
class SimReport:
    cruise: list[float]  # per taxi, seconds
    picked: list[bool]
    pickup_point: list[int | None]
    total_cruise: float
    pickups: int

    def to_dict(self) -> dict:
        return {"rng": RNG_NAME, **asdict(self)}


def gen_poisson_events(inst: Instance, horizon: float, seed: int) -> list[PassengerEvent]:
    """Homogeneous Poisson arrivals on ``(0, horizon]`` at every point, merged by time."""
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    rng = np.random.default_rng(seed)
    events = []
    for c, lam in zip(inst.points, inst.rates):
        times = _poisson_times(rng, lam, horizon)
        events.extend(PassengerEvent(c, float(t)) for t in times)
    events.sort(key=lambda e: (e.time, e.point))
    return events


def _poisson_times(rng: np.random.Generator, lam: float, horizon: float) -> np.ndarray:
    scale = 1.0 / lam
    out = []
    t = 0.0
    batch = max(8, int(lam * horizon * 1.2) + 8)
    while True:
        draws = t + np.cumsum(rng.exponential(scale, batch))
        inside = draws[draws <= horizon]
        out.append(inside)
        if inside.size < batch:
            break
        t = draws[-1]
    return np.concatenate(out)


def simulate(rec: Recommendation, inst: Instance, events: Sequence[PassengerEvent]) -> SimReport:
    by_point: dict[int, list[float]] = {}
    prev_time = -np.inf
    for e in events:
        if e.time < prev_time:
            raise ValueError("events must be sorted by time")
        prev_time = e.time
        if not 1 <= e.point <= inst.n_points:
            raise InstanceError(f"event at unknown point {e.point}")
        by_point.setdefault(e.point, []).append(e.time)

    K = len(rec)
    cruise = [0.0] * K
    picked = [False] * K
    where: list[int | None] = [None] * K
    for k, route in enumerate(rec):
        # overwritten on pickup; failures pay the full route plus penalty
        end = sum(int(inst.travel[a, b]) for a, b in zip((0,) + route[:-1], route))
        cruise[k] = end + inst.penalty

    last_visit: dict[int, float] = {}
    for k, u, c, t in arrival_times(rec, inst.travel):
        if picked[k - 1]:
            continue
        times = by_point.get(c, ())
        since = last_visit.get(c, 0.0)
        # any arrival in (since, t]
        if bisect.bisect_right(times, t) > bisect.bisect_right(times, since):
            picked[k - 1] = True
            where[k - 1] = c
            cruise[k - 1] = float(t)
        last_visit[c] = float(t)

    return SimReport(cruise, picked, where, float(sum(cruise)), sum(picked))


@dataclass
class MeanReport:
    cruise: list[float]  # per taxi, mean seconds
    pickup_rate: list[float]  # per taxi, fraction of days with a pickup
    total_cruise: float
    pickups: float
    days: int

    def to_dict(self) -> dict:
        return {"rng": RNG_NAME, **asdict(self)}


def mean_report(reports: Sequence[SimReport]) -> MeanReport:
    n = len(reports)
    K = len(reports[0].cruise)
    return MeanReport(
        cruise=[sum(r.cruise[k] for r in reports) / n for k in range(K)],
        pickup_rate=[sum(r.picked[k] for r in reports) / n for k in range(K)],
        total_cruise=sum(r.total_cruise for r in reports) / n,
        pickups=sum(r.pickups for r in reports) / n,
        days=n,
    )


def batch_simulate(
    rec_by_method: Mapping[str, Recommendation],
    inst: Instance,
    n_days: int,
    horizon: float,
    seed: int,
) -> dict[str, MeanReport]:
    """Average each method's report over ``n_days`` shared streams seeded ``seed + d``."""
    if n_days < 1:
        raise ValueError("n_days must be >= 1")
    streams = [gen_poisson_events(inst, horizon, seed + d) for d in range(n_days)]
    out = {}
    for name, rec in rec_by_method.items():
        reports = [simulate(rec, inst, ev) for ev in streams]
        out[name] = mean_report(reports)
    return out


def read_events(path: str | Path) -> list[PassengerEvent]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"point_id", "time_s"} <= set(reader.fieldnames):
            raise ValueError("events CSV needs columns point_id,time_s")
        return [PassengerEvent(int(row["point_id"]), float(row["time_s"])) for row in reader]


def write_events(events: Sequence[PassengerEvent], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["point_id", "time_s"])
        for e in events:
            w.writerow([e.point, repr(e.time)])


def report_json(report: SimReport | MeanReport) -> str:
    return json.dumps(report.to_dict(), indent=2)
