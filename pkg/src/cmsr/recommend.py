"""Recommendation builders: greedy (GR), random (RAN) and round-robin over the best routes."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .evaluate import ENGINES
from .model import Instance, Recommendation
from .single_route import best_routes

Evaluator = Callable[[Recommendation, Instance], float]


@dataclass(frozen=True)
class GreedyStep:
    iteration: int
    route: int  # 1-based route index that was extended
    point: int
    value: float  # F of the partial recommendation after the commit


def greedy_recommend(
    inst: Instance,
    engine: str | Evaluator = "se",
    threads: int = 1,
) -> tuple[Recommendation, list[GreedyStep]]:
    """Append one point at a time to whichever route lowers F the most.

    Every candidate extension is evaluated from scratch. Ties on F keep the
    first candidate in (route index, point id) order.
    """
    evaluate = ENGINES[engine] if isinstance(engine, str) else engine
    routes: list[tuple[int, ...]] = [() for _ in range(inst.fleet)]
    trace: list[GreedyStep] = []
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for it in range(1, inst.fleet * inst.route_len + 1):
            cands = [
                (j, i)
                for j, route in enumerate(routes)
                if len(route) < inst.route_len
                for i in inst.points
                if i not in route
            ]
            recs = [_extend(routes, j, i) for j, i in cands]
            if pool is None:
                values = [evaluate(r, inst) for r in recs]
            else:
                values = list(pool.map(lambda r: evaluate(r, inst), recs))
            best = min(range(len(cands)), key=lambda n: (values[n], n))
            j, i = cands[best]
            routes[j] = routes[j] + (i,)
            trace.append(GreedyStep(it, j + 1, i, values[best]))
    finally:
        if pool is not None:
            pool.shutdown()
    return tuple(routes), trace


def _extend(routes, j, i) -> Recommendation:
    out = list(routes)
    out[j] = out[j] + (i,)
    return tuple(out)


def random_recommend(inst: Instance, seed: int) -> Recommendation:
    """K independent uniform draws of length-L routes (repeats across taxis allowed)."""
    rng = np.random.default_rng(seed)
    points = np.arange(1, inst.n_points + 1)
    return tuple(
        tuple(int(c) for c in rng.choice(points, size=inst.route_len, replace=False))
        for _ in range(inst.fleet)
    )


def lcp_style_recommend(inst: Instance, pool: int = 5) -> Recommendation:
    """Round-robin assignment of the ``pool`` best single routes.

    Approximates the LCP baseline by its assignment scheme only; the original
    route search is not reproduced.
    """
    best = [rs.route for rs in best_routes(inst, pool)]
    return tuple(best[k % len(best)] for k in range(inst.fleet))


def save_trace(trace: list[GreedyStep], path: str | Path) -> None:
    Path(path).write_text(json.dumps([asdict(s) for s in trace], indent=1) + "\n")
