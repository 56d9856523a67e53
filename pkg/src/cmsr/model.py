"""Instance data model, routes, recommendations and visit tuples.

Point ids: 0 is the shared starting position of every taxi, 1..N are pick-up
points. Routes are plain tuples of point ids; a recommendation is a tuple of
routes (an ordered multiset, so duplicates across taxis are allowed).

Route index ``k`` and position ``u`` inside visit tuples and outcome vectors
are 1-based, mirroring the usual notation for this problem.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

Route = tuple[int, ...]
Recommendation = tuple[Route, ...]


class InstanceError(ValueError):
    """Raised when an instance, route or recommendation violates an invariant."""


class VisitTuple(NamedTuple):
    k: int  # route index, 1-based
    u: int  # position within route, 1-based
    c: int  # pick-up point
    t: int  # arrival time, seconds since departure from point 0


@dataclass(frozen=True)
class Instance:
    n_points: int
    rates: np.ndarray  # length N, events/second, rates[c - 1] is point c
    travel: np.ndarray  # (N+1, N+1) integer seconds
    penalty: float
    route_len: int
    fleet: int

    def __post_init__(self):
        rates = np.array(self.rates, dtype=float)
        travel = np.array(self.travel)
        if not np.issubdtype(travel.dtype, np.integer) and np.any(np.mod(travel, 1) != 0):
            raise InstanceError("travel times must be integer seconds")
        travel = travel.astype(np.int64)
        rates.flags.writeable = False
        travel.flags.writeable = False
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "travel", travel)
        object.__setattr__(self, "penalty", float(self.penalty))

    @cached_property
    def lam(self) -> np.ndarray:
        """Rates indexed by point id, with ``lam[0] == 0`` for the start."""
        lam = np.concatenate(([0.0], self.rates))
        lam.flags.writeable = False
        return lam

    @property
    def points(self) -> range:
        return range(1, self.n_points + 1)

    def to_dict(self) -> dict:
        return {
            "n_points": self.n_points,
            "rates": [float(r) for r in self.rates],
            "travel": self.travel.tolist(),
            "penalty": int(self.penalty) if float(self.penalty).is_integer() else self.penalty,
            "route_len": self.route_len,
            "fleet": self.fleet,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        try:
            inst = cls(
                n_points=int(data["n_points"]),
                rates=data["rates"],
                travel=data["travel"],
                penalty=data["penalty"],
                route_len=int(data["route_len"]),
                fleet=int(data["fleet"]),
            )
        except KeyError as exc:
            raise InstanceError(f"missing field {exc.args[0]!r}") from None
        return validate_instance(inst)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Instance":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def with_params(self, **changes) -> "Instance":
        fields = self.to_dict()
        fields.update(changes)
        return validate_instance(Instance(**fields))


def validate_instance(raw: Instance) -> Instance:
    """Return ``raw`` unchanged if every invariant holds, else raise on the first violation."""
    n = raw.n_points
    if n < 1:
        raise InstanceError("n_points must be >= 1")
    if raw.rates.shape != (n,):
        raise InstanceError(f"expected {n} arrival rates, got {raw.rates.size}")
    if not np.all(np.isfinite(raw.rates)):
        raise InstanceError("arrival rates must be finite")
    if np.any(raw.rates <= 0):
        raise InstanceError("zero arrival rate" if np.any(raw.rates == 0) else "negative arrival rate")
    if raw.travel.shape != (n + 1, n + 1):
        raise InstanceError(f"travel matrix must be {n + 1}x{n + 1}, got {raw.travel.shape}")
    if np.any(raw.travel < 0):
        raise InstanceError("negative travel time")
    if np.any(np.diag(raw.travel) != 0):
        raise InstanceError("non-zero diagonal travel time")
    if raw.penalty < 0:
        raise InstanceError("negative penalty")
    if raw.route_len < 1:
        raise InstanceError("route_len must be >= 1")
    if raw.route_len > n:
        raise InstanceError("route length exceeds point count")
    if raw.fleet < 1:
        raise InstanceError("fleet must be >= 1")
    return raw


def make_route(points: Sequence[int], n_points: int | None = None) -> Route:
    route = tuple(int(c) for c in points)
    if 0 in route:
        raise InstanceError("route contains the start position 0")
    if len(set(route)) != len(route):
        raise InstanceError(f"route {route} repeats a point")
    if n_points is not None:
        bad = [c for c in route if not 1 <= c <= n_points]
        if bad:
            raise InstanceError(f"route references unknown point {bad[0]}")
    return route


def make_recommendation(routes: Sequence[Sequence[int]], n_points: int | None = None) -> Recommendation:
    return tuple(make_route(r, n_points) for r in routes)


def load_recommendation(path: str | Path, n_points: int | None = None) -> Recommendation:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise InstanceError("recommendation file must be a JSON array of arrays")
    return make_recommendation(data, n_points)


def save_recommendation(rec: Recommendation, path: str | Path) -> None:
    Path(path).write_text(json.dumps([list(r) for r in rec]) + "\n")


def arrival_times(rec: Recommendation, travel: np.ndarray) -> list[VisitTuple]:
    """All (route, position) visits, sorted by arrival time then route index."""
    visits = []
    for k, route in enumerate(rec, start=1):
        t = 0
        prev = 0
        for u, c in enumerate(route, start=1):
            t += int(travel[prev, c])
            visits.append(VisitTuple(k, u, c, t))
            prev = c
    visits.sort(key=lambda v: (v.t, v.k))
    return visits


def outcome_shape(rec: Recommendation) -> tuple[int, ...]:
    """Per-taxi outcome count ``l_k + 1``; the outcome space is their product."""
    return tuple(len(r) + 1 for r in rec)
