from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from motpaver import golden
from motpaver.geometry import closure_contains, hull_equal, ri_contains, ri_intersects
from motpaver.measures import DiscreteMeasure, dirac
from motpaver.paving import (cell_mass_range, check_support_containment, compute_paving, feasible_support,
                             irreducible_perturbation, nu_invariance)
from motpaver.transport import NotInConvexOrder

from instances import martingale_instance

SPREAD = DiscreteMeasure([[-1], [1]], [F(1, 2), F(1, 2)])
CORNERS = [(-3, -3), (-3, 3), (3, -3), (3, 3)]


def test_support_of_dirac_pair():
    sup = feasible_support(dirac([0]), dirac([0]))
    assert sup.pairs == {(0, 0)} and sup.max_mass[(0, 0)] == 1


def test_support_of_forced_spread():
    sup = feasible_support(dirac([0]), SPREAD)
    assert sup.pairs == {(0, 0), (0, 1)}
    assert all(v == F(1, 2) for v in sup.max_mass.values())


def test_example_support_is_union_of_vertex_supports():
    inst = golden.example_4_2()
    sup = feasible_support(inst.mu, inst.nu)
    union = inst.couplings["P1"].support() | inst.couplings["P2"].support()
    assert sup.pairs == union
    y = inst.nu_labels
    assert (0, y.index("y2")) not in sup.pairs
    assert (0, y.index("y1")) in sup.pairs
    assert sup.witness.is_feasible() and sup.witness.support() == sup.pairs


def test_identity_pairs_are_singletons():
    mu = DiscreteMeasure([(0, 0), (1, 2), (3, -1)], [F(1, 3)] * 3)
    paving = compute_paving(mu, mu)
    assert len(paving) == 3
    assert all(c.dim == 0 for c in paving.components)
    assert all(nu_invariance(paving))


def test_example_paving():
    inst = golden.example_4_2()
    paving = compute_paving(inst.mu, inst.nu)
    assert len(paving) == 2
    for comp, note in zip(paving.components, inst.notes["components"]):
        assert [inst.mu_labels[i] for i in comp.members] == note["members"]
        assert {tuple(v) for v in comp.vertices()} == {tuple(map(F, v)) for v in note["vertices"]}
    assert [c.eta for c in paving.components] == [F(1, 3), F(2, 3)]
    assert nu_invariance(paving) == [False, False]
    # y0 sits on the shared edge: attached to both components, charged by neither in every coupling
    y0 = inst.nu_labels.index("y0")
    for comp in paving.components:
        assert y0 in comp.j_atoms and y0 in comp.boundary_atoms(inst.nu)
        assert y0 not in comp.sure_atoms(paving.arith)


def test_spread_attaches_both_ends():
    paving = compute_paving(dirac([0]), SPREAD)
    (comp,) = paving.components
    assert comp.j_atoms == [0, 1]
    assert comp.boundary_atoms(SPREAD) == [0, 1]


def test_support_containment_of_vertex_couplings():
    inst = golden.example_4_2()
    paving = compute_paving(inst.mu, inst.nu)
    for name in ("P1", "P2"):
        assert check_support_containment(paving, inst.couplings[name]) == []


def test_one_dimensional_example_grid():
    inst = golden.example_2_1(16)
    paving = compute_paving(inst.mu, inst.nu)
    assert len(paving) == 2
    got = [{inst.nu.atoms[j][0] for j in c.boundary_atoms(inst.nu)} for c in paving.components]
    assert got == inst.notes["boundary_atoms"]
    assert all(nu_invariance(paving))


def test_unique_coupling_instance():
    inst = golden.example_4_1(8, exact=False)
    paving = compute_paving(inst.mu, inst.nu)
    assert len(paving) == 3
    lo, hi = cell_mass_range(inst.mu, inst.nu, paving.region)
    assert float(abs(hi - lo).max()) <= 1e-9


def test_perturbation_glues_everything():
    inst = golden.example_4_2()
    for eps in (F(1, 10), 1, F(1, 2), F(1, 4), F(1, 8)):
        mu2, nu2 = irreducible_perturbation(inst.mu, inst.nu, eps, CORNERS)
        paving = compute_paving(mu2, nu2)
        assert len(paving) == 1
        comp = paving.components[0]
        assert all(closure_contains(comp.polytope, y) for y in nu2.atoms)


def test_perturbation_of_dirac():
    mu2, nu2 = irreducible_perturbation(dirac([0, 0]), dirac([0, 0]), 1, [(-1, -1), (-1, 1), (1, -1), (1, 1)])
    assert len(compute_paving(mu2, nu2)) == 1


def test_perturbation_errors():
    with pytest.raises(ValueError):
        irreducible_perturbation(dirac([0]), dirac([0]), 0, [(-1,), (1,)])
    with pytest.raises(ValueError):
        irreducible_perturbation(dirac([0]), SPREAD, 1, [(-1,), (1,)])
    with pytest.raises(NotInConvexOrder):
        irreducible_perturbation(SPREAD, dirac([0]), 1, [(-2,), (2,)])


def test_not_in_order_raises():
    with pytest.raises(NotInConvexOrder):
        compute_paving(SPREAD, dirac([0]))


def test_parallel_matches_serial():
    inst = golden.example_4_2()
    a = compute_paving(inst.mu, inst.nu, jobs=1)
    b = compute_paving(inst.mu, inst.nu, jobs=2)
    assert [c.members for c in a.components] == [c.members for c in b.components]
    assert [c.j_mass for c in a.components] == [c.j_mass for c in b.components]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([1, 2]))
def test_paving_properties(seed, d):
    mu, nu = martingale_instance(seed, d)
    paving = compute_paving(mu, nu)
    comps = paving.components
    for k, comp in enumerate(comps):
        for i in comp.members:
            assert ri_contains(comp.polytope, mu.atoms[i])
            for other in comps:
                if other is not comp:
                    assert not ri_contains(other.polytope, mu.atoms[i])
        for j in comp.j_atoms:
            assert closure_contains(comp.polytope, nu.atoms[j])
        # J sandwich: every nu atom inside I and charged is attached
        for j in range(len(nu)):
            if ri_contains(comp.polytope, nu.atoms[j]) and comp.j_mass.get(j, (0, 0))[1] > 0:
                assert j in comp.j_atoms
    for a in range(len(comps)):
        for b in range(a + 1, len(comps)):
            assert not ri_intersects(comps[a].polytope, comps[b].polytope)
            assert not hull_equal(comps[a].polytope, comps[b].polytope)
    assert check_support_containment(paving, paving.support.witness) == []
    assert sum(c.eta for c in comps) == 1
    if d == 1:
        assert all(nu_invariance(paving))
