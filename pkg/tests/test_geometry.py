import random
from fractions import Fraction as F

import numpy as np
from hypothesis import given, settings, strategies as st

from motpaver.geometry import Polytope, affine_hull, closure_contains, hull_equal, ri_contains, ri_intersects
from motpaver.measures import DiscreteMeasure

LEFT = [(-2, 0), (0, 1), (0, -1)]
RIGHT = [(2, 0), (0, 1), (0, -1)]


def test_affine_hull_dimensions():
    assert affine_hull([(0, 0)]).dim == 0
    line = affine_hull([(0, 0), (1, 0), (2, 0)])
    assert line.dim == 1
    assert line.contains((5, 0)) and not line.contains((0, 1))
    assert affine_hull(LEFT).dim == 2


def test_ri_segment():
    seg = Polytope([(0, 0), (1, 0)])
    assert ri_contains(seg, (F(1, 2), 0))
    assert not ri_contains(seg, (0, 0))
    assert closure_contains(seg, (0, 0))
    assert not closure_contains(seg, (2, 0))


def test_ri_quadrilateral_contains_its_atom():
    quad = Polytope([(-1, -1), (-1, 1), (0, 1), (0, -1)])
    assert ri_contains(quad, (F(-1, 2), 0))


def test_ri_intersects():
    seg = [(0, 0), (1, 0)]
    assert ri_intersects(Polytope(seg), Polytope(seg))
    assert not ri_intersects(Polytope(LEFT), Polytope(RIGHT))
    square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    shifted = [(x + F(1, 2), y) for x, y in square]
    assert ri_intersects(Polytope(square), Polytope(shifted))


def test_hull_equal():
    assert hull_equal(Polytope([(0,), (1,)]), Polytope([(0,), (F(1, 2),), (1,)]))
    assert hull_equal(Polytope([(0, 0), (1, 1)]), Polytope([(1, 1), (0, 0)]))
    assert not hull_equal(Polytope(LEFT), Polytope(RIGHT))


def test_closure_of_triangle_contains_shared_atom():
    assert closure_contains(Polytope(LEFT), (0, 0))
    assert not ri_contains(Polytope(LEFT), (0, 0))


def test_vertices_drop_interior_generators():
    P = Polytope([(0, 0), (2, 0), (0, 2), (F(1, 2), F(1, 2)), (1, 0)])
    assert {tuple(v) for v in P.vertices} == {(0, 0), (2, 0), (0, 2)}


def test_float_polytopes():
    P = Polytope(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert ri_contains(P, (0.25, 0.25))
    assert not ri_contains(P, (0.5, 0.0))
    assert closure_contains(P, (0.5, 0.0))


points = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=5)


@settings(max_examples=60, deadline=None)
@given(points, st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
def test_ri_implies_closure(pts, x):
    P = Polytope(pts)
    if ri_contains(P, x):
        assert closure_contains(P, x)


@settings(max_examples=60, deadline=None)
@given(points, st.integers(0, 10**6))
def test_barycenter_in_relative_interior(pts, seed):
    rng = random.Random(seed)
    pts = list(dict.fromkeys(pts))
    w = [F(rng.randint(1, 5)) for _ in pts]
    m = DiscreteMeasure(pts, [v / sum(w) for v in w])
    assert ri_contains(Polytope(m.atoms), m.barycenter())


@settings(max_examples=40, deadline=None)
@given(st.lists(points, min_size=3, max_size=5))
def test_hull_equal_is_equivalence(family):
    polys = [Polytope(p) for p in family]
    # add reordered/duplicated copies so that equal pairs actually occur
    polys += [Polytope(list(reversed(p)) + p[:1]) for p in family]
    eq = [[hull_equal(a, b) for b in polys] for a in polys]
    n = len(polys)
    for i in range(n):
        assert eq[i][i]
        for j in range(n):
            assert eq[i][j] == eq[j][i]
            for k in range(n):
                if eq[i][j] and eq[j][k]:
                    assert eq[i][k]
    for i in range(len(family)):
        assert eq[i][i + len(family)]
