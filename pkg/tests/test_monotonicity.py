import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from motpaver import golden
from motpaver.measures import DiscreteMeasure, dirac
from motpaver.monotonicity import (FinitePlan, certify_support, competitor_max, is_competitor,
                                   optimality_iff_concentrated, weakly_convex_check_1d)
from motpaver.paving import compute_paving
from motpaver.transport import solve_mot

from instances import martingale_instance, random_cost
from oracles import competitor_max_bruteforce

XS = [[-1], [1]]
YS = [[-2], [0], [2]]
P0 = [[0, F(1, 4), 0], [F(1, 3), F(1, 12), F(1, 3)]]
D = [[1, -2, 1], [-1, 2, -1]]  # the one free direction of the competitor polytope


def test_single_pair_plan():
    plan = FinitePlan([[0]], [[3]], [[1]])
    val, comp = competitor_max(plan, lambda x, y: x[0] * y[0] + 7)
    assert val == 7 and comp.mass[0, 0] == 1


def test_one_row_plan_has_unique_competitor():
    plan = FinitePlan([[0]], YS, [[F(1, 4), F(1, 2), F(1, 4)]])
    cost = [[5, -1, 2]]
    val, comp = competitor_max(plan, cost)
    assert val == plan.value(plan.arith.array(cost))
    assert list(comp.mass[0]) == list(plan.mass[0])


def test_plan_validation():
    with pytest.raises(ValueError):
        FinitePlan([[0]], [[1]], [[F(1, 2)]])
    with pytest.raises(ValueError):
        FinitePlan([[0], [0]], [[1]], [[F(1, 2)], [F(1, 2)]])


def test_two_row_segment_against_sweep():
    plan = FinitePlan(XS, YS, P0)
    rng = random.Random(3)
    for _ in range(20):
        cost = [[F(rng.randint(-6, 6), rng.randint(1, 3)) for _ in YS] for _ in XS]
        val, comp = competitor_max(plan, cost)
        assert is_competitor(plan, comp)
        # sweep t over a grid of [0, 1/8] that contains both endpoints
        best = None
        for k in range(65):
            t = F(k, 8 * 64)
            q = [[P0[i][j] + t * D[i][j] for j in range(3)] for i in range(2)]
            assert all(v >= 0 for row in q for v in row)
            v = sum(cost[i][j] * q[i][j] for i in range(2) for j in range(3))
            best = v if best is None else max(best, v)
        assert val == best


def test_segment_endpoints():
    plan = FinitePlan(XS, YS, P0)
    # the (x=-1, y=-2) cell runs from 0 to 1/8 along the segment
    cost = [[1, 0, 0], [0, 0, 0]]
    assert competitor_max(plan, cost)[0] == F(1, 8)
    assert competitor_max(plan, [[-1, 0, 0], [0, 0, 0]])[0] == 0


def test_wider_universe_does_not_change_the_maximum():
    plan = FinitePlan(XS, YS, P0)
    cost = lambda x, y: (y[0] - x[0]) ** 2 * x[0]
    a, _ = competitor_max(plan, cost)
    b, comp = competitor_max(plan, cost, y_universe=[[-2], [-1], [0], [1], [2]])
    assert a == b
    assert is_competitor(plan, comp)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_competitor_max_matches_enumeration(seed):
    rng = random.Random(seed)
    a, b = rng.randint(1, 3), rng.randint(1, 3)
    ys = [[v] for v in rng.sample(range(-4, 5), b)]
    xs = [[v] for v in rng.sample(range(-4, 5), a)]
    w = [[F(rng.randint(0, 3)) for _ in range(b)] for _ in range(a)]
    for row in w:
        if sum(row) == 0:
            row[rng.randrange(b)] = F(1)
    tot = sum(map(sum, w))
    mass = [[v / tot for v in row] for row in w]
    cost = [[F(rng.randint(-5, 5)) for _ in range(b)] for _ in range(a)]
    val, _ = competitor_max(FinitePlan(xs, ys, mass), cost)
    assert val == competitor_max_bruteforce(mass, [y for y in ys], cost)


def test_certify_example_supports():
    inst = golden.example_4_2()
    res = solve_mot(inst.mu, inst.nu, inst.cost)
    good = certify_support(res.coupling.support(), inst.mu, inst.nu, inst.cost)
    assert good.certified and good.witness is None
    bad = certify_support(inst.couplings["P1"].support(), inst.mu, inst.nu, inst.cost)
    assert bad.verdict == "violated"
    w = bad.witness
    sub = inst.cost[w.rows][:, w.cols]
    assert w.verify(sub)
    y1 = inst.nu_labels.index("y1")
    # the improvement moves mass onto the rewarded cell
    assert 0 in w.rows and y1 in w.cols
    assert w.competitor.mass[w.rows.index(0), w.cols.index(y1)] > 0


def test_full_grid_zero_cost_is_certified():
    inst = golden.example_4_2()
    grid = [(i, j) for i in range(3) for j in range(5)]
    assert certify_support(grid, inst.mu, inst.nu, None).certified


def test_certify_is_seeded():
    inst = golden.example_4_2()
    a = certify_support(inst.couplings["P1"].support(), inst.mu, inst.nu, inst.cost, seed=5)
    b = certify_support(inst.couplings["P1"].support(), inst.mu, inst.nu, inst.cost, seed=5)
    assert a.trials == b.trials and a.witness.gap == b.witness.gap


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([1, 2]))
def test_optimizer_supports_are_certified(seed, d):
    mu, nu = martingale_instance(seed, d, max_mu=4, max_nu=5)
    cost = random_cost(seed, len(mu), len(nu))
    res = solve_mot(mu, nu, cost)
    assert certify_support(res.coupling.support(), mu, nu, cost, budget=40, seed=seed).certified


def test_concentration_examples():
    inst = golden.example_4_2()
    rep = optimality_iff_concentrated(inst.mu, inst.nu, inst.cost, dict(inst.couplings))
    assert rep.optimizer_concentrated
    assert not rep.couplings["P1"]["concentrated"] and not rep.couplings["P1"]["optimal"]
    assert rep.couplings["P2"]["concentrated"] and rep.couplings["P2"]["optimal"]
    assert rep.face_min == rep.face_max == F(1, 12)
    zero = optimality_iff_concentrated(inst.mu, inst.nu, None, dict(inst.couplings))
    assert len(zero.gamma) == 15
    assert all(r["optimal"] for name, r in zero.couplings.items() if r["feasible"])


def test_concentration_for_unique_coupling():
    nu = DiscreteMeasure([[-1], [1]], [F(1, 2), F(1, 2)])
    rep = optimality_iff_concentrated(dirac([0]), nu, lambda x, y: y[0] ** 3)
    assert rep.optimizer_concentrated and rep.holds


def test_weak_convexity_checks():
    inst = golden.example_2_1(16)
    paving = compute_paving(inst.mu, inst.nu)
    ys = [y[0] for y in inst.nu.atoms]
    assert weakly_convex_check_1d([y * y for y in ys], paving) == [True, True]
    assert weakly_convex_check_1d([-y * y for y in ys], paving) == [False, False]
    ex = golden.example_4_2()
    with pytest.raises(ValueError):
        weakly_convex_check_1d([0] * 5, compute_paving(ex.mu, ex.nu))
