"""Seeded synthetic instances."""

from __future__ import annotations

import numpy as np

from .ingest import mean_off_diagonal
from .model import Instance, InstanceError, validate_instance

DEFAULT_RATES = (1 / 2000, 1 / 200)  # events per second
DEFAULT_TIMES = (60, 900)  # seconds


def random_instance(
    n: int,
    k: int,
    l: int,
    seed: int,
    rate_range: tuple[float, float] = DEFAULT_RATES,
    time_range: tuple[int, int] = DEFAULT_TIMES,
) -> Instance:
    """Uniform rates and asymmetric integer travel times; penalty is the mean travel time."""
    lo, hi = rate_range
    if not 0 < lo <= hi:
        raise InstanceError(f"bad rate range {rate_range}")
    tlo, thi = time_range
    if not 0 <= tlo <= thi:
        raise InstanceError(f"bad time range {time_range}")
    if l > n:
        raise InstanceError("route length exceeds point count")
    rng = np.random.default_rng(seed)
    rates = rng.uniform(lo, hi, n)
    travel = rng.integers(tlo, thi, size=(n + 1, n + 1), endpoint=True)
    np.fill_diagonal(travel, 0)
    return validate_instance(
        Instance(
            n_points=n,
            rates=rates,
            travel=travel,
            penalty=round(mean_off_diagonal(travel)),
            route_len=l,
            fleet=k,
        )
    )
