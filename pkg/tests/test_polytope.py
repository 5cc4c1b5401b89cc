import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toricimplicit.arith import SparsePoly
from toricimplicit.polytope import (
    DegeneratePolytope,
    LatticePolytope,
    NotSurfaceCase,
    contraction,
    ehrhart,
    gamma,
    interior_points,
    is_normal,
    lattice_points,
    newton_polytope,
    normalized_area,
)

from oracles import brute_lattice_points

point_sets = st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=3, max_size=8)


def polygon_or_none(pts):
    try:
        return LatticePolytope(pts)
    except DegeneratePolytope:
        return None


@given(point_sets)
def test_polygon_contains_its_points(pts):
    P = polygon_or_none(pts)
    if P is None:
        return
    assert all(P.contains(p) for p in pts)
    assert set(P.vertices) <= set(pts)
    assert sorted(lattice_points(P)) == sorted(brute_lattice_points(P.vertices, 1))


@given(point_sets, st.integers(1, 3))
def test_scaling(pts, k):
    P = polygon_or_none(pts)
    if P is None:
        return
    assert ehrhart(P, k) == len(lattice_points(P.scaled(k)))
    assert normalized_area(P.scaled(k)) == k * k * normalized_area(P)


def test_degenerate_inputs():
    with pytest.raises(DegeneratePolytope):
        LatticePolytope([(0, 0), (1, 1), (2, 2)])
    with pytest.raises(DegeneratePolytope):
        LatticePolytope([])
    with pytest.raises(NotSurfaceCase):
        normalized_area(LatticePolytope([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_simplex_gamma_equals_dimension(n):
    simplex = LatticePolytope([tuple(0 for _ in range(n))] + [tuple(int(i == j) for j in range(n)) for i in range(n)])
    assert gamma(simplex) == n
    assert gamma(simplex.scaled(n + 1)) == 0


def test_square_and_lattice_points_in_3d():
    square = LatticePolytope([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert gamma(square) == 1
    assert len(interior_points(square, 2)) == 1
    cube = LatticePolytope(list(itertools.product((0, 2), repeat=3)))
    assert len(lattice_points(cube)) == 27
    assert len(interior_points(cube)) == 1
    assert len(cube.facets) == 6


def test_newton_polytope_of_polynomials():
    f = SparsePoly(2, {(1, 6): 1, (0, 0): 2})
    g = SparsePoly(2, {(2, 6): 1, (1, 4): 1})
    P = newton_polytope([f, g])
    assert sorted(P.vertices) == [(0, 0), (1, 6), (2, 6)]
    assert len(lattice_points(P)) == 6


def test_contraction_recovers_factor():
    base = LatticePolytope([(0, 0), (2, 1), (1, 3)])
    P = base.scaled(3).translated((4, -1))
    c = contraction(P)
    assert c.factor == 3
    assert c.translation == (4, -1)
    assert c.base == base


def test_reeve_tetrahedron_is_not_normal():
    reeve = LatticePolytope([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 3)])
    cert = is_normal(reeve)
    assert not cert
    assert cert.witness in lattice_points(reeve, cert.level)
    assert is_normal(LatticePolytope(list(itertools.product((0, 1), repeat=3))))


def test_random_3d_lattice_points_match_brute_force():
    rng = random.Random(5)
    for _ in range(10):
        pts = [tuple(rng.randint(0, 3) for _ in range(3)) for _ in range(6)]
        try:
            P = LatticePolytope(pts)
        except DegeneratePolytope:
            continue
        box = itertools.product(*[range(0, 4)] * 3)
        inside = [p for p in box if all(sum(a * b for a, b in zip(n, p)) >= off for n, off in P.facets)]
        assert sorted(lattice_points(P)) == sorted(inside)
        assert all(P.contains(v) for v in pts)


@given(point_sets, st.integers(1, 2), st.integers(1, 2))
def test_sums_of_lattice_points(pts, a, b):
    P = polygon_or_none(pts)
    if P is None:
        return
    sums = {(x[0] + y[0], x[1] + y[1]) for x in lattice_points(P, a) for y in lattice_points(P, b)}
    # polygons are normal, so every point of (a+b)P is a sum
    assert sums == set(lattice_points(P, a + b))


@given(point_sets, st.integers(0, 6))
def test_interior_points_avoid_the_boundary(pts, k):
    P = polygon_or_none(pts)
    if P is None:
        return
    inner = interior_points(P, k)
    assert set(inner) <= set(lattice_points(P, k))
    for p in inner:
        assert all(n[0] * p[0] + n[1] * p[1] > k * off for n, off in P.facets)


@given(point_sets)
def test_gamma_bound_and_idempotent_contraction(pts):
    P = polygon_or_none(pts)
    if P is None:
        return
    assert gamma(P) + 1 <= P.dim + 1
    assert contraction(contraction(P).base).factor == 1


def test_sums_detect_non_normality():
    reeve = LatticePolytope([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 3)])
    ones = lattice_points(reeve)
    sums = {tuple(a + b for a, b in zip(x, y)) for x in ones for y in ones}
    assert len(sums) < len(lattice_points(reeve, 2))
