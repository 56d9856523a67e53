"""Single-taxi potential travel time, route enumeration, Top-K and the lower bound."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .model import Instance, InstanceError, Recommendation, Route
from .probability import miss_prob_from_rate, pickup_prob_from_rate

CHUNK = 1 << 16


@dataclass(frozen=True, order=True)
class RouteScore:
    ptt: float
    route: Route


def single_ptt(route: Route, inst: Instance) -> float:
    """Expected cruising seconds of one taxi alone on ``route``.

    Dot product of cumulative-time and stop-probability vectors; the last
    component is the no-pickup outcome, charged the whole route plus penalty.
    Every visit is a first visit, so the interval is the arrival time itself.
    """
    if not route:
        raise InstanceError("empty route")
    lam = inst.rates
    times = []
    probs = []
    t = 0
    prev = 0
    for c in route:
        t += int(inst.travel[prev, c])
        times.append(float(t))
        probs.append(-math.expm1(-lam[c - 1] * t))
        prev = c
    d = times + [times[-1] + inst.penalty]
    p = []
    survive = 1.0
    for q in probs:
        p.append(survive * q)
        survive *= 1.0 - q
    p.append(survive)
    return math.fsum(di * pi for di, pi in zip(d, p))


def route_ptts(routes: np.ndarray, inst: Instance) -> np.ndarray:
    """Vectorised ``single_ptt`` over an ``(M, l)`` array of routes."""
    routes = np.asarray(routes, dtype=np.int64)
    if routes.ndim != 2 or routes.shape[1] == 0:
        raise InstanceError("need a non-empty (M, l) route array")
    T = inst.travel
    legs = np.empty(routes.shape, dtype=np.int64)
    legs[:, 0] = T[0, routes[:, 0]]
    legs[:, 1:] = T[routes[:, :-1], routes[:, 1:]]
    t = np.cumsum(legs, axis=1).astype(float)
    lam = inst.lam[routes]
    q = pickup_prob_from_rate(lam, t)
    miss = miss_prob_from_rate(lam, t)
    survive = np.cumprod(miss, axis=1)
    before = np.ones_like(survive)
    before[:, 1:] = survive[:, :-1]
    return (t * before * q).sum(axis=1) + (t[:, -1] + inst.penalty) * survive[:, -1]


def enumerate_routes(inst: Instance, length: int) -> Iterator[Route]:
    """All ordered sequences of ``length`` distinct points, lexicographically."""
    if not 1 <= length <= inst.n_points:
        raise InstanceError(f"route length {length} outside 1..{inst.n_points}")
    return itertools.permutations(inst.points, length)


def count_routes(n: int, length: int) -> int:
    return math.perm(n, length)


def _scored_chunks(inst: Instance, length: int) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    it = enumerate_routes(inst, length)
    while True:
        chunk = list(itertools.islice(it, CHUNK))
        if not chunk:
            return
        arr = np.array(chunk, dtype=np.int64)
        yield arr, route_ptts(arr, inst)


def best_routes(inst: Instance, count: int, length: int | None = None) -> list[RouteScore]:
    """The ``count`` lowest-PTT routes, ascending; ties go to the lexicographically smaller route."""
    length = inst.route_len if length is None else length
    best: list[RouteScore] = []
    for arr, scores in _scored_chunks(inst, length):
        # stable sort keeps lexicographic order among equal scores
        order = np.argsort(scores, kind="stable")[:count]
        cands = [RouteScore(float(scores[i]), tuple(int(c) for c in arr[i])) for i in order]
        best = heapq.nsmallest(count, best + cands)
    return best


def top_k_routes(inst: Instance) -> Recommendation:
    return tuple(rs.route for rs in best_routes(inst, inst.fleet))


def min_ptt(inst: Instance) -> float:
    return min(float(scores.min()) for _, scores in _scored_chunks(inst, inst.route_len))


def lower_bound(inst: Instance) -> float:
    """``K`` times the best uncontested single-route PTT."""
    return inst.fleet * min_ptt(inst)
