import itertools
import math
import random

import numpy as np
import pytest

from cmsr.evaluate import evaluate_sa, evaluate_se
from cmsr.model import Instance, InstanceError
from cmsr.recommend import greedy_recommend
from cmsr.single_route import (
    best_routes,
    count_routes,
    enumerate_routes,
    lower_bound,
    route_ptts,
    single_ptt,
    top_k_routes,
)
from cmsr.synthetic import random_instance

from helpers import random_case


def one_point(lam, t0=10, penalty=50):
    return Instance(1, [lam], [[0, t0], [t0, 0]], penalty, 1, 1)


def test_single_point_two_outcomes():
    inst = one_point(0.02)
    p = 1 - math.exp(-0.02 * 10)
    assert single_ptt((1,), inst) == pytest.approx(10 * p + 60 * (1 - p), rel=1e-14)


def test_certain_first_pickup():
    inst = random_instance(5, 1, 3, seed=2).with_params(rates=[50.0] * 5)
    route = (3, 1, 4)
    assert single_ptt(route, inst) == pytest.approx(inst.travel[0, 3], rel=1e-12)


def test_hopeless_route_costs_route_plus_penalty():
    inst = random_instance(5, 1, 3, seed=2, time_range=(5, 40)).with_params(rates=[1e-12] * 5)
    route = (2, 5, 1)
    total = inst.travel[0, 2] + inst.travel[2, 5] + inst.travel[5, 1]
    assert single_ptt(route, inst) == pytest.approx(total + inst.penalty, abs=1e-6)


def test_empty_route_rejected():
    with pytest.raises(InstanceError):
        single_ptt((), one_point(0.1))


def test_ptt_at_least_first_leg():
    inst = random_instance(6, 1, 4, seed=9)
    for route in enumerate_routes(inst, 4):
        assert single_ptt(route, inst) >= inst.travel[0, route[0]]


def test_vectorised_matches_scalar():
    inst = random_instance(7, 1, 3, seed=4)
    routes = list(enumerate_routes(inst, 3))
    vec = route_ptts(np.array(routes), inst)
    scalar = [single_ptt(r, inst) for r in routes]
    np.testing.assert_allclose(vec, scalar, rtol=1e-13)


def test_matches_collective_evaluators_for_one_taxi():
    rng = random.Random(11)
    for _ in range(50):
        inst, rec = random_case(rng, max_k=1)
        f = single_ptt(rec[0], inst)
        assert evaluate_se(rec, inst) == pytest.approx(f, rel=1e-9)
        assert evaluate_sa(rec, inst) == pytest.approx(f, rel=1e-9)


class TestEnumerate:
    def test_three_choose_two(self):
        inst = random_instance(3, 1, 2, seed=0)
        assert list(enumerate_routes(inst, 2)) == [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]

    def test_length_one(self):
        inst = random_instance(2, 1, 1, seed=0)
        assert list(enumerate_routes(inst, 1)) == [(1,), (2,)]

    def test_streamed_count_at_n25_l5(self):
        inst = random_instance(25, 1, 5, seed=0)
        n = sum(1 for _ in enumerate_routes(inst, 5))
        assert n == 25 * 24 * 23 * 22 * 21 == count_routes(25, 5) == 6_375_600

    def test_bad_length(self):
        with pytest.raises(InstanceError):
            enumerate_routes(random_instance(3, 1, 2, seed=0), 4)


class TestTopK:
    def test_against_full_sort(self):
        inst = random_instance(4, 2, 2, seed=5)
        scored = sorted((single_ptt(r, inst), r) for r in itertools.permutations(range(1, 5), 2))
        assert len(scored) == 12
        assert top_k_routes(inst) == tuple(r for _, r in scored[:2])
        assert [rs.route for rs in best_routes(inst, 12)] == [r for _, r in scored]

    def test_k1_is_best_route(self):
        inst = random_instance(6, 1, 3, seed=8)
        best = min(enumerate_routes(inst, 3), key=lambda r: single_ptt(r, inst))
        assert top_k_routes(inst) == (best,)

    def test_ties_are_lexicographic(self):
        inst = Instance(2, [0.01, 0.01], [[0, 30, 30], [30, 0, 30], [30, 30, 0]], 100, 1, 2)
        assert top_k_routes(inst) == ((1,), (2,))

    def test_scores_non_decreasing(self):
        inst = random_instance(8, 6, 3, seed=1)
        ptts = [single_ptt(r, inst) for r in top_k_routes(inst)]
        assert ptts == sorted(ptts)

    def test_chunk_boundaries(self, monkeypatch):
        import cmsr.single_route as sr

        inst = random_instance(7, 5, 3, seed=3)
        expected = top_k_routes(inst)
        monkeypatch.setattr(sr, "CHUNK", 7)
        assert top_k_routes(inst) == expected


class TestLowerBound:
    def test_k1_is_optimal_ptt(self):
        inst = random_instance(6, 1, 3, seed=8)
        assert lower_bound(inst) == pytest.approx(min(single_ptt(r, inst) for r in enumerate_routes(inst, 3)))

    def test_linear_in_k(self):
        inst = random_instance(6, 1, 3, seed=8)
        assert lower_bound(inst.with_params(fleet=3)) == pytest.approx(3 * lower_bound(inst), rel=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_below_greedy(self, seed):
        inst = random_instance(8, 3, 3, seed)
        _, trace = greedy_recommend(inst)
        assert lower_bound(inst) <= trace[-1].value
