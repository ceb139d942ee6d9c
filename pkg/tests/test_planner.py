import decimal
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oric.errors import Infeasible, PlannerOverflow
from oric.oracle import simulate_detection
from oric.planner import (PlannerSpec, conservative_chains, detection_probability, false_positive_probability,
                          plan, required_chains)


def naive_detection(p, L, M):
    return 1.0 - (1.0 - p ** L) ** M


def budget_margin(p1, L, M, eta1):
    """M * log(1 - p1**L) - log(eta1) in 50-digit decimal arithmetic, relative to |log eta1|."""
    with decimal.localcontext() as ctx:
        ctx.prec = 50
        target = decimal.Decimal(eta1).ln()
        return float(((1 - decimal.Decimal(p1) ** L).ln() * M - target) / abs(target))


@pytest.mark.parametrize("p,L,M", [(0.5, 3, 10), (0.3, 5, 1000), (0.9, 2, 3), (0.05, 4, 10 ** 6)])
def test_detection_matches_naive_formula(p, L, M):
    assert detection_probability(p, L, M) == pytest.approx(naive_detection(p, L, M), rel=1e-9)


def test_detection_stable_at_extremes():
    # naive (1 - p**L)**M is 0 here; stable form keeps the tiny value
    tiny = detection_probability(1e-3, 10, 5)
    assert 0 < tiny == pytest.approx(5e-30, rel=1e-6)
    assert detection_probability(0.0, 3, 100) == 0.0
    assert detection_probability(1.0, 3, 1) == 1.0
    assert detection_probability(0.5, 3, 0) == 0.0


@settings(max_examples=200)
@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.integers(1, 30), st.integers(1, 30),
       st.floats(1, 1e6), st.floats(1, 1e6))
def test_detection_monotonicity(p_a, p_b, L_a, L_b, M_a, M_b):
    lo_p, hi_p = sorted((p_a, p_b))
    lo_L, hi_L = sorted((L_a, L_b))
    lo_M, hi_M = sorted((M_a, M_b))
    assert detection_probability(lo_p, lo_L, lo_M) <= detection_probability(hi_p, lo_L, lo_M) + 1e-15
    assert detection_probability(lo_p, lo_L, lo_M) <= detection_probability(lo_p, lo_L, hi_M) + 1e-15
    assert detection_probability(lo_p, hi_L, lo_M) <= detection_probability(lo_p, lo_L, lo_M) + 1e-15


def test_required_chains_examples():
    # (1 - 0.25)^m <= 0.05 first holds at m = 11
    assert required_chains(0.5, 2, 0.05) == 11
    assert 0.75 ** 11 <= 0.05 < 0.75 ** 10
    assert required_chains(0.9, 1, 0.1) == 1
    assert required_chains(1.0, 7, 0.01) == 1


@settings(max_examples=200)
@given(st.floats(0.01, 0.99), st.integers(1, 16), st.floats(0.001, 0.5))
def test_required_chains_minimal(p1, L, eta1):
    try:
        m = required_chains(p1, L, eta1)
    except PlannerOverflow:
        assert math.log(eta1) / math.log1p(-p1 ** L) > 2 ** 53
        return
    slack = 1e-14
    assert budget_margin(p1, L, m, eta1) <= slack
    if m > 1:
        assert budget_margin(p1, L, m - 1, eta1) > -slack


def test_plan_reference_case():
    res = plan(PlannerSpec(theta=0.5, eta1=0.05, eta2=0.05, p1=0.5, p2=0.3))
    assert (res.L_star, res.M_star) == (8, 766)
    assert res.detect_prob_frequent >= 0.95
    assert res.detect_prob_infrequent <= 0.05
    assert res.detect_prob_infrequent == pytest.approx(
        naive_detection(0.3, 8, math.log(0.05) / math.log(1 - 0.5 ** 8) + 1), rel=1e-9)
    curve = res.false_positive_curve
    assert len(curve) == res.L_star
    assert all(b <= a for a, b in zip(curve, curve[1:]))
    # L* is the first length meeting the budget
    assert all(v > 0.05 for v in curve[:-1])


def test_plan_well_separated():
    res = plan(PlannerSpec(0.9, 0.05, 0.05, 0.9, 0.1))
    assert res.L_star <= 4
    assert res.detect_prob_frequent >= 0.95 and res.detect_prob_infrequent <= 0.05
    rng = np.random.default_rng(0)
    assert simulate_detection(0.9, res.L_star, res.M_star, 20000, rng) >= 0.95 - 0.01


def test_plan_impossible_pattern():
    assert plan(PlannerSpec(0.5, 0.05, 0.05, 0.5, 0.0)).L_star == 1


def test_plan_horizon_bound():
    res = plan(PlannerSpec(0.5, 0.05, 0.05, 0.5, 0.2, horizon=5))
    assert (res.L_star, res.M_star) == (5, 95)
    assert res.multi_update_fp_bound == pytest.approx(0.25)


def test_plan_close_frequencies():
    # 0.51 vs 0.50 would need roughly 1e59 chains; the scan stops when counts leave float range
    with pytest.raises(Infeasible) as info:
        plan(PlannerSpec(0.51, 0.05, 0.05, 0.51, 0.50))
    err = info.value
    curve = err.curve
    assert len(curve) > plan(PlannerSpec(0.9, 0.05, 0.05, 0.9, 0.1)).L_star
    assert all(b <= a for a, b in zip(curve, curve[1:]))
    assert err.best_probability == curve[-1] > 0.05
    # a larger search space cannot help once counts overflow
    with pytest.raises(Infeasible):
        plan(PlannerSpec(0.51, 0.05, 0.05, 0.51, 0.50), L_max=200)


def test_plan_infeasible_small_cap():
    with pytest.raises(Infeasible) as info:
        plan(PlannerSpec(0.5, 0.05, 0.05, 0.5, 0.3), L_max=3)
    assert info.value.best_length == 3


def test_planner_input_validation():
    with pytest.raises(ValueError):
        PlannerSpec(0.5, 0.05, 0.05, 0.4, 0.3)
    with pytest.raises(ValueError):
        PlannerSpec(0.5, 0.0, 0.05, 0.5, 0.3)
    with pytest.raises(ValueError):
        plan(PlannerSpec(0.5, 0.05, 0.05, 0.5, 0.3), L_max=0)


@settings(max_examples=100)
@given(st.floats(0.3, 0.95), st.floats(0.01, 0.9), st.floats(0.01, 0.2))
def test_false_positive_curve_nonincreasing(p1, ratio, eta1):
    p2 = p1 * ratio
    vals = [false_positive_probability(p1, p2, L, eta1) for L in range(1, 25)]
    for a, b in zip(vals, vals[1:]):
        assert b <= a * (1 + 1e-9) + 1e-15


def test_conservative_exceeds_integer_count():
    for L in range(1, 15):
        assert conservative_chains(0.5, L, 0.05) >= required_chains(0.5, L, 0.05)
