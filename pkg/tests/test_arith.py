from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricimplicit.arith import (
    DimensionMismatch,
    NonSquareError,
    QMatrix,
    SparsePoly,
    bareiss_det,
    det_cofactor,
    det_rational,
    divide,
    grlex_key,
    kernel_basis,
    poly_gcd,
    rank,
    rref,
    squarefree_part,
)

from oracles import leibniz_det


def polys(nvars=2, max_exp=3, max_terms=5):
    mono = st.tuples(*[st.integers(0, max_exp)] * nvars)
    coeff = st.fractions(min_value=-6, max_value=6, max_denominator=4).filter(bool)
    return st.dictionaries(mono, coeff, max_size=max_terms).map(lambda d: SparsePoly(nvars, d))


def matrices(max_n=5, lo=-4, hi=4):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n))


@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == SparsePoly.zero(2)


@given(polys(), polys().filter(bool))
def test_divexact_undoes_multiplication(a, b):
    assert (a * b).divexact(b) == a


@given(polys(), polys().filter(bool))
def test_division_identity(a, b):
    q, r = divide(a, b)
    assert q * b + r == a


@settings(max_examples=40)
@given(polys(max_terms=3), polys(max_terms=3), polys(max_terms=3).filter(lambda p: p.total_degree() > 0))
def test_gcd_contains_common_factor(a, b, g):
    left, right = a * g, b * g
    d = poly_gcd(left, right)
    if left or right:
        left.divexact(d)
        right.divexact(d)
    if left and right:
        d.divexact(g.primitive())


@given(polys(), polys(), st.lists(st.integers(-5, 5), min_size=2, max_size=2))
def test_evaluation_is_a_ring_map(a, b, pt):
    assert (a * b).evaluate(pt) == a.evaluate(pt) * b.evaluate(pt)
    assert (a + b).evaluate(pt) == a.evaluate(pt) + b.evaluate(pt)


@given(polys(), polys(), polys(), st.lists(st.integers(-4, 4), min_size=2, max_size=2))
def test_substitute_matches_evaluation(p, u, v, pt):
    assert p.substitute([u, v]).evaluate(pt) == p.evaluate([u.evaluate(pt), v.evaluate(pt)])


@given(polys())
def test_homogenize_then_dehomogenize(p):
    h = p.homogenize()
    assert h.is_homogeneous()
    assert h.evaluate([3, -2, 1]) == p.evaluate([3, -2])


def test_squarefree_part():
    x = SparsePoly.variable(2, 0)
    y = SparsePoly.variable(2, 1)
    p = (x + y) ** 3 * (x - 2 * y)
    assert squarefree_part(p).primitive() == ((x + y) * (x - 2 * y)).primitive()


def test_to_string_and_leading_term():
    p = SparsePoly(2, {(2, 0): 3, (0, 1): -1, (0, 0): Fraction(1, 2)})
    assert p.leading_term()[0] == (2, 0)
    assert p.to_string(["s", "t"]) == "3*s^2 - t + 1/2"
    assert grlex_key((3, 0)) > grlex_key((1, 2)) > grlex_key((2, 0))


@given(matrices())
def test_determinant_routes_agree(rows):
    expected = leibniz_det(rows)
    assert det_rational(rows) == expected
    entries = [[SparsePoly.constant(1, x) for x in r] for r in rows]
    for d in (bareiss_det(entries), det_cofactor(entries)):
        assert (d.constant_value() if d else 0) == expected


@settings(max_examples=25)
@given(st.integers(1, 3), st.data())
def test_symbolic_determinants_agree(n, data):
    entries = [[data.draw(polys(max_exp=1, max_terms=3)) for _ in range(n)] for _ in range(n)]
    assert bareiss_det(entries) == det_cofactor(entries)


def test_non_square_determinant():
    with pytest.raises(NonSquareError):
        det_rational([[1, 2, 3], [4, 5, 6]])


@given(st.integers(1, 5), st.integers(1, 6), st.data())
def test_rref_is_canonical(r, c, data):
    rows = data.draw(st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r))
    reduced, pivots = rref(rows)
    assert len(pivots) == rank(rows)
    for i, p in enumerate(pivots):
        assert reduced[i][p] == 1
        assert all(reduced[j][p] == 0 for j in range(len(reduced)) if j != i)
    # row operations do not change the form
    mixed = [list(map(lambda a, b: a + 2 * b, rows[0], rows[-1]))] + rows[1:] if r > 1 else rows
    assert rref(mixed + rows)[0] == reduced


@settings(max_examples=40)
@given(st.integers(1, 8), st.integers(1, 10), st.data())
def test_kernel_routes_agree(r, c, data):
    rows = data.draw(st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r))
    exact = kernel_basis(rows, method="exact")
    assert kernel_basis(rows, method="modular") == exact
    assert len(exact) == c - rank(rows, method="exact")


def test_qmatrix_and_mismatch():
    m = QMatrix.identity(3)
    assert m.apply([1, 2, 3]) == [1, 2, 3]
    assert m.transpose() == m
    with pytest.raises(ValueError):
        kernel_basis([[1, 2]], method="nonsense")


def test_rank_at_rejects_wrong_length():
    from toricimplicit.arith import rank_at

    class Grid:
        entries = [[[1, 0], [0, 1]]]
        target_vars = ["X0", "X1"]

    assert rank_at(Grid, [1, 1]) == 1
    with pytest.raises(DimensionMismatch):
        rank_at(Grid, [1, 1, 1])


@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_kernel_is_deterministic(r, c, data):
    rows = data.draw(st.lists(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3), min_size=c,
                                       max_size=c), min_size=r, max_size=r))
    assert repr(kernel_basis(rows)) == repr(kernel_basis(rows))


@settings(max_examples=40)
@given(polys(max_terms=3), polys(max_terms=3), polys(max_terms=3).filter(lambda p: p.total_degree() > 0))
def test_gcd_is_divisible_by_the_shared_factor(p, q, h):
    if not p or not q or poly_gcd(p, q).total_degree() > 0:
        return
    d = poly_gcd(p * h, q * h)
    quotient, rest = divide(d, h.primitive())
    assert not rest
