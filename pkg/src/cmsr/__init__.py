"""Collective mobile sequential recommendation for taxi fleets."""

from .evaluate import OutcomeTable, delta_for, evaluate_sa, evaluate_se, sa_table, se_table
from .model import (
    Instance,
    InstanceError,
    Recommendation,
    Route,
    VisitTuple,
    arrival_times,
    validate_instance,
)
from .probability import PickupModel, estimate_rate, pickup_prob
from .recommend import GreedyStep, greedy_recommend, lcp_style_recommend, random_recommend
from .simulate import PassengerEvent, SimReport, batch_simulate, gen_poisson_events, simulate
from .single_route import enumerate_routes, lower_bound, single_ptt, top_k_routes

__version__ = "0.1.0"
