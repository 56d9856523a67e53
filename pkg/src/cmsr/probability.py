"""Poisson pick-up probability and the inter-arrival rate estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def pickup_prob_from_rate(lam, delta):
    """``1 - exp(-lam * delta)``, vectorised; stable when ``lam * delta`` is tiny."""
    return -np.expm1(-np.multiply(lam, delta))


def miss_prob_from_rate(lam, delta):
    return np.exp(-np.multiply(lam, delta))


@dataclass(frozen=True)
class PickupModel:
    """Per-point arrival rates; point 0 (the start) never yields a passenger."""

    rates: Sequence[float]

    def __post_init__(self):
        if any(r <= 0 for r in self.rates):
            raise ValueError("arrival rates must be positive")

    def pickup_prob(self, c: int, delta: float) -> float:
        return pickup_prob(self.rates, c, delta)


def pickup_prob(rates: Sequence[float], c: int, delta: float) -> float:
    """Probability that a taxi reaching ``c`` finds a passenger ``delta`` seconds after the last visit.

    ``rates[c - 1]`` is the rate of point ``c``.
    """
    if delta < 0:
        raise ValueError(f"negative interval {delta}")
    if c == 0:
        return 0.0
    return -math.expm1(-rates[c - 1] * delta)


def estimate_rate(intervals: Sequence[float]) -> float:
    """Unbiased rate estimate ``(n - 1) / sum(intervals)`` from inter-event gaps."""
    n = len(intervals)
    if n < 2:
        raise ValueError(f"need at least 2 intervals to estimate a rate, got {n}")
    if any(t <= 0 for t in intervals):
        raise ValueError("intervals must be positive")
    return (n - 1) / math.fsum(intervals)
