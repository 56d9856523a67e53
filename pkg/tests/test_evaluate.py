import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmsr.evaluate import build_delta_index, delta_for, evaluate_sa, evaluate_se, sa_table, se_table
from cmsr.model import Instance, VisitTuple, arrival_times
from cmsr.probability import pickup_prob

from helpers import FIG1_RATES, fig1_travel, random_case


def P(c, d):
    return pickup_prob(FIG1_RATES, c, d)


def Q(c, d):
    return 1 - P(c, d)


def brute_force(rec, inst):
    """Per-outcome product of pickup/miss probabilities using delta_for; returns (F, {u: p})."""
    visits = arrival_times(rec, inst.travel)
    index = build_delta_index(visits)
    total = []
    probs = {}
    for u in itertools.product(*(range(1, len(r) + 2) for r in rec)):
        p = 1.0
        for v in visits:
            uk = u[v.k - 1]
            if v.u > uk:
                continue
            q = pickup_prob(inst.rates, v.c, delta_for(u, v, index))
            p *= q if v.u == uk else 1 - q
        s = 0.0
        for k, route in enumerate(rec):
            stops = route[: u[k]]
            s += sum(inst.travel[a, b] for a, b in zip((0,) + stops[:-1], stops))
            if u[k] == len(route) + 1:
                s += inst.penalty
        probs[u] = p
        total.append(p * s)
    return math.fsum(total), probs


class TestDelta:
    def test_fig1(self):
        visits = arrival_times(((1, 2, 3), (2, 1, 3)), fig1_travel())
        index = build_delta_index(visits)
        by_ku = {(v.k, v.u): v for v in visits}
        u = (2, 3)
        assert delta_for(u, by_ku[1, 2], index) == 8
        assert delta_for(u, by_ku[2, 2], index) == 17
        assert delta_for(u, by_ku[2, 3], index) == 47

    def test_single_taxi_uses_arrival_time(self):
        visits = arrival_times(((3, 1, 2),), fig1_travel())
        index = build_delta_index(visits)
        for v in visits:
            assert delta_for((4,), v, index) == v.t

    def test_simultaneous_arrival(self):
        visits = arrival_times(((1,), (1,)), fig1_travel())
        index = build_delta_index(visits)
        first, second = visits
        assert delta_for((2, 2), first, index) == 10
        assert delta_for((2, 2), second, index) == 0


class TestFig1:
    def test_two_by_two_probabilities(self, fig1):
        table = sa_table(((1, 2), (2, 1)), fig1)
        assert table.prob((1, 1)) == pytest.approx(P(1, 10) * P(2, 12), abs=1e-15)
        assert table.prob((2, 2)) == pytest.approx(Q(1, 10) * P(2, 8) * Q(2, 12) * P(1, 17), abs=1e-15)
        assert table.prob((2, 1)) == pytest.approx(Q(1, 10) * P(2, 8) * P(2, 12), abs=1e-15)

    def test_cruising_time(self, fig1):
        T = fig1.travel
        expected = T[0, 1] + T[1, 2] + T[0, 2] + T[2, 1] + T[1, 3]
        for table in (sa_table(((1, 2, 3), (2, 1, 3)), fig1), se_table(((1, 2, 3), (2, 1, 3)), fig1)):
            assert table.time((2, 3)) == expected

    def test_sequential_extension(self, fig1):
        before = se_table(((1, 2, 3), (2, 1)), fig1)
        after = se_table(((1, 2, 3), (2, 1, 3)), fig1)
        assert after.prob((2, 3)) == pytest.approx(before.prob((2, 3)) * P(3, 47), abs=1e-15)
        assert after.prob((2, 4)) == pytest.approx(before.prob((2, 3)) * Q(3, 47), abs=1e-15)
        assert after.prob((2, 2)) == pytest.approx(before.prob((2, 2)), abs=1e-15)
        assert after.prob((2, 2)) == pytest.approx(Q(1, 10) * P(2, 8) * Q(2, 12) * P(1, 17), abs=1e-15)

    def test_brute_force_agrees(self, fig1):
        rec = ((1, 2, 3, 4), (2, 1, 3, 4))
        f, probs = brute_force(rec, fig1)
        assert evaluate_sa(rec, fig1) == pytest.approx(f, rel=1e-12)
        assert evaluate_se(rec, fig1) == pytest.approx(f, rel=1e-12)
        table = se_table(rec, fig1)
        for u, p in probs.items():
            assert table.prob(u) == pytest.approx(p, abs=1e-15)


@pytest.mark.parametrize("seed", range(40))
def test_three_routes_agree(seed):
    inst, rec = random_case(random.Random(seed), max_n=7, max_k=3, max_l=3)
    f, probs = brute_force(rec, inst)
    sa, se = evaluate_sa(rec, inst), evaluate_se(rec, inst)
    assert sa == pytest.approx(f, rel=1e-12, abs=1e-12)
    assert se == pytest.approx(f, rel=1e-12, abs=1e-12)
    assert math.fsum(probs.values()) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_se_matches_sa(seed):
    inst, rec = random_case(random.Random(seed), max_time=rng_time(seed))
    sa = sa_table(rec, inst)
    se = se_table(rec, inst)
    assert se.value == pytest.approx(sa.value, rel=1e-9, abs=1e-12)
    assert abs(se.p.sum() - 1) <= 1e-12
    assert se.states_visited == math.prod(len(r) + 1 for r in rec)
    assert np.all((se.p >= 0) & (se.p <= 1)) and np.all(se.s >= 0)


def rng_time(seed):
    # small time ranges make simultaneous arrivals common
    return (3, 40)[seed % 2]


def test_ties_go_to_lower_index():
    T = np.array([[0, 5, 5], [5, 0, 5], [5, 5, 0]])
    inst = Instance(2, [0.1, 0.1], T, 40, 2, 2)
    table = se_table(((1, 2), (1, 2)), inst)
    # taxi 2 shadows taxi 1 at the same instants: it sees a zero gap wherever taxi 1 was cruising
    assert table.prob((1, 1)) == 0.0
    assert table.prob((2, 1)) == 0.0
    assert table.prob((2, 2)) == 0.0
    assert table.prob((1, 2)) > 0.0
    assert sa_table(((1, 2), (1, 2)), inst).value == pytest.approx(table.value, rel=1e-12)


def test_reorder_invariant_without_collisions():
    rng = random.Random(3)
    checked = 0
    while checked < 20:
        inst, rec = random_case(rng, max_n=8, max_k=4, max_l=3, max_time=1000)
        visits = arrival_times(rec, inst.travel)
        stamps = [(v.c, v.t) for v in visits]
        if len(set(stamps)) != len(stamps):
            continue
        f = evaluate_se(rec, inst)
        for perm in itertools.islice(itertools.permutations(rec), 6):
            assert evaluate_se(perm, inst) == pytest.approx(f, rel=1e-12)
        checked += 1


def test_duplicate_route_second_taxi_sees_shorter_gaps(fig1):
    route = (2, 1, 3)
    rec = (route, route)
    visits = arrival_times(rec, fig1.travel)
    index = build_delta_index(visits)
    first = {v.u: v for v in visits if v.k == 1}
    second = {v.u: v for v in visits if v.k == 2}
    for u in itertools.product(range(1, 5), repeat=2):
        for pos in range(1, min(u) + 1):
            if pos > len(route):
                continue
            d1 = delta_for(u, first[pos], index)
            d2 = delta_for(u, second[pos], index)
            assert d2 <= d1
            assert pickup_prob(fig1.rates, route[pos - 1], d2) <= pickup_prob(fig1.rates, route[pos - 1], d1)


def test_empty_routes_cost_penalty(fig1):
    assert evaluate_se(((), ()), fig1) == pytest.approx(2 * fig1.penalty)
    assert evaluate_sa(((), ()), fig1) == pytest.approx(2 * fig1.penalty)
    with_empty = evaluate_se(((1, 2), ()), fig1)
    alone = evaluate_se(((1, 2),), fig1)
    assert with_empty == pytest.approx(alone + fig1.penalty, rel=1e-12)
    assert evaluate_sa(((1, 2), ()), fig1) == pytest.approx(with_empty, rel=1e-12)


def test_zero_travel_times():
    T = np.zeros((4, 4), dtype=int)
    inst = Instance(3, [0.1, 0.2, 0.3], T, 25, 3, 3)
    rec = ((1, 2), (2, 1), (1, 3))
    assert evaluate_se(rec, inst) == pytest.approx(evaluate_sa(rec, inst), rel=1e-12)
    # nothing has time to arrive, so every taxi fails
    assert evaluate_se(rec, inst) == pytest.approx(3 * 25)
