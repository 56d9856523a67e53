"""Expected total cruising time F of a K-route recommendation.

Two independent evaluators:

* :func:`evaluate_sa` enumerates every outcome vector and walks the sorted
  visit tuples once per outcome with fresh last-visit registers.
* :func:`evaluate_se` grows the outcome table one visit tuple at a time. Each
  tuple extends the prefix recommendation by one point; states whose taxi is
  still cruising past its processed prefix split into "picked up here" and
  "continues".

Outcome tables are dense ``numpy`` arrays of shape ``(l_1 + 1, ..., l_K + 1)``;
array index ``i`` on axis ``k`` is outcome component ``u_k = i + 1``. The
loops themselves live in :mod:`cmsr._kernels`.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _kernels
from .model import Instance, Recommendation, VisitTuple, arrival_times, outcome_shape

DeltaIndex = Mapping[int, Sequence[VisitTuple]]


@dataclass
class OutcomeTable:
    p: np.ndarray
    s: np.ndarray
    lengths: tuple[int, ...]
    states_visited: int = 0

    @property
    def value(self) -> float:
        return float(_kernels.table_value(self.p.ravel(), self.s.ravel()))

    def prob(self, u: Sequence[int]) -> float:
        return float(self.p[tuple(x - 1 for x in u)])

    def time(self, u: Sequence[int]) -> float:
        return float(self.s[tuple(x - 1 for x in u)])


def build_delta_index(visits: Sequence[VisitTuple]) -> dict[int, list[VisitTuple]]:
    """Group visit tuples by point, keeping the global (t, k) order."""
    index: dict[int, list[VisitTuple]] = defaultdict(list)
    for v in sorted(visits, key=lambda v: (v.t, v.k)):
        index[v.c].append(v)
    return index


def delta_for(u: Sequence[int], visit: VisitTuple, index: DeltaIndex) -> int:
    """Seconds since the last still-cruising taxi visited ``visit.c`` under outcome ``u``.

    A visitor ``(k', u', c, t')`` counts if the taxi was still cruising there
    (``u' <= u[k'-1]``) and arrived strictly before in (t, k) order. With no
    such visitor the interval is the arrival time itself.
    """
    key = (visit.t, visit.k)
    for prior in reversed(index.get(visit.c, ())):
        if (prior.t, prior.k) >= key:
            continue
        if prior.u <= u[prior.k - 1]:
            return visit.t - prior.t
    return visit.t


def _visit_arrays(rec: Recommendation, inst: Instance):
    """Visit tuples in (t, k) order as parallel arrays, plus each visit's leg time."""
    visits = arrival_times(rec, inst.travel)
    cols = np.array(visits, dtype=np.int64).reshape(len(visits), 4).T
    vk = cols[0] - 1
    vc = cols[2]
    vt = cols[3].astype(float)
    return visits, vk, cols[1], vc, vt, inst.lam[vc]


def _strides(shape: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    radix = np.array(shape, dtype=np.int64)
    strides = np.cumprod((1,) + shape[:0:-1])[::-1].astype(np.int64)
    return radix, strides


def sa_table(rec: Recommendation, inst: Instance) -> OutcomeTable:
    """Outcome table by direct enumeration of every outcome vector."""
    shape = outcome_shape(rec)
    radix, strides = _strides(shape)
    _, vk, vu, vc, vt, vlam = _visit_arrays(rec, inst)
    lengths = np.array([len(r) for r in rec], dtype=np.int64)
    cum = np.zeros((len(rec), max(1, int(lengths.max(initial=0)))))
    for k, route in enumerate(rec):
        if route:
            cum[k, : len(route)] = np.cumsum(inst.travel[(0,) + route[:-1], route])
    p, s = _kernels.sa_kernel(
        radix, strides, vk, vu, vc, vt, vlam, cum, lengths, inst.penalty, inst.n_points
    )
    return OutcomeTable(p.reshape(shape), s.reshape(shape), tuple(lengths.tolist()), p.size)


def se_table(rec: Recommendation, inst: Instance) -> OutcomeTable:
    """Outcome table by sequential extension over the time-sorted visit tuples."""
    shape = outcome_shape(rec)
    radix, strides = _strides(shape)
    visits, vk, vu, vc, vt, vlam = _visit_arrays(rec, inst)
    leg = []
    prior_ptr = [0]
    prior: list[int] = []
    seen: dict[int, list[int]] = defaultdict(list)
    route_clock = [0] * len(rec)
    for i, (k, _, c, t) in enumerate(visits):
        leg.append(t - route_clock[k - 1])
        route_clock[k - 1] = t
        prior.extend(reversed(seen[c]))
        prior_ptr.append(len(prior))
        seen[c].append(i)
    p, s, states = _kernels.se_kernel(
        radix,
        strides,
        vk,
        vu,
        vt,
        vlam,
        np.array(leg, dtype=float),
        np.array(prior_ptr, dtype=np.int64),
        np.array(prior, dtype=np.int64),
        inst.penalty,
    )
    return OutcomeTable(p.reshape(shape), s.reshape(shape), tuple(len(r) for r in rec), int(states))


def evaluate_sa(rec: Recommendation, inst: Instance) -> float:
    return sa_table(rec, inst).value


def evaluate_se(rec: Recommendation, inst: Instance) -> float:
    return se_table(rec, inst).value


ENGINES: dict[str, Callable[[Recommendation, Instance], float]] = {
    "sa": evaluate_sa,
    "se": evaluate_se,
}
