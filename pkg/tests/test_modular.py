from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricimplicit import modular
from toricimplicit.modular import (
    interpolate_mod,
    load_kernels,
    matmul_mod,
    poly_gcd_mod,
    primes,
    ratrecon,
    vandermonde_inverse,
)

P = next(primes())
compiled = pytest.importorskip("toricimplicit._kernels")
fallback, _ = load_kernels("python")


def mod_matrix(rows, cols):
    return st.lists(st.lists(st.integers(0, P - 1), min_size=cols, max_size=cols), min_size=rows, max_size=rows).map(
        lambda r: np.array(r, dtype=np.int64))


def small_matrix(rows, cols):
    # small entries give rank deficiency often enough to exercise the pivot search
    return st.lists(st.lists(st.integers(0, 2), min_size=cols, max_size=cols), min_size=rows, max_size=rows).map(
        lambda r: np.array(r, dtype=np.int64))


shapes = st.tuples(st.integers(1, 7), st.integers(1, 7))


@given(shapes.flatmap(lambda s: st.one_of(mod_matrix(*s), small_matrix(*s))))
def test_rref_backends_agree(a):
    x, y = a.copy(), a.copy()
    assert list(compiled.rref_mod(x, P)) == list(fallback.rref_mod(y, P))
    assert np.array_equal(x, y)


@given(shapes.flatmap(lambda s: st.one_of(mod_matrix(*s), small_matrix(*s))))
def test_rank_backends_agree(a):
    assert compiled.rank_mod(a.copy(), P) == fallback.rank_mod(a.copy(), P)


@given(st.integers(1, 6).flatmap(lambda n: st.one_of(mod_matrix(n, n), small_matrix(n, n))))
def test_det_backends_agree(a):
    d = compiled.det_mod(a.copy(), P)
    assert d == fallback.det_mod(a.copy(), P)
    exact = round(np.linalg.det(a.astype(float))) if a.max() < 3 else None
    if exact is not None:
        assert d == exact % P


@settings(max_examples=30)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(mod_matrix(n, n), mod_matrix(n, n))))
def test_pencil_backends_agree(ab):
    a, b = ab
    lams = np.arange(1, a.shape[0] + 2, dtype=np.int64)
    fast = list(compiled.pencil_dets_mod(a, b, lams, P))
    slow = list(fallback.pencil_dets_mod(a, b, lams, P))
    assert fast == slow
    for lam, d in zip(lams, fast):
        assert d == compiled.det_mod((a + lam * b) % P, P)


def test_backend_switch(monkeypatch):
    monkeypatch.setenv("TORICIMPLICIT_BACKEND", "python")
    assert load_kernels()[1] == "python"
    monkeypatch.setenv("TORICIMPLICIT_BACKEND", "cython")
    assert load_kernels()[1] == "cython"


def test_primes_are_distinct_primes():
    gen = primes()
    ps = [next(gen) for _ in range(5)]
    assert len(set(ps)) == 5
    assert all(p < 2**31 and all(p % q for q in range(3, 2000, 2)) for p in ps)


@given(st.fractions(max_denominator=1000).filter(lambda f: abs(f.numerator) < 1000))
def test_ratrecon_roundtrip(f):
    m = P * next(iter(p for p in primes() if p != P))
    a = f.numerator * pow(f.denominator, -1, m) % m
    assert ratrecon(a, m) == f


@given(st.lists(st.integers(0, P - 1), min_size=1, max_size=6))
def test_interpolation_and_vandermonde(coeffs):
    xs = list(range(1, len(coeffs) + 1))
    ys = [sum(c * pow(x, i, P) for i, c in enumerate(coeffs)) % P for x in xs]
    trimmed = list(coeffs)
    while trimmed and trimmed[-1] == 0:
        trimmed.pop()
    assert interpolate_mod(xs, ys, P) == trimmed
    vinv = vandermonde_inverse(xs, P)
    assert list(matmul_mod(vinv, np.array(ys, dtype=np.int64)[:, None], P)[:, 0]) == coeffs


@given(st.integers(0, P - 1), st.integers(0, P - 1))
def test_gcd_mod_of_products(a, b):
    # (x - a)(x - b) and (x - a)(x + 1)
    f = [a * b % P, (-a - b) % P, 1]
    g = [(-a) % P, (1 - a) % P, 1]
    got = poly_gcd_mod(f, g, P)
    expected = [(-a) % P, 1] if (b + 1) % P else f
    assert got == expected


def test_matmul_large_entries():
    rng = np.random.default_rng(1)
    a = rng.integers(0, P, size=(7, 9), dtype=np.int64)
    b = rng.integers(0, P, size=(9, 4), dtype=np.int64)
    exact = (a.astype(object) @ b.astype(object)) % P
    assert np.array_equal(matmul_mod(a, b, P).astype(object), exact)


def test_exact_rank_and_kernel_on_rational_rows():
    rows = [[Fraction(1, 2), 1, 0], [1, 2, 0], [0, 0, Fraction(3, 7)]]
    assert modular.exact_rank(rows, 3) == 2
    basis = modular.kernel_basis_modular(rows, 3)
    assert basis == [[-2, 1, 0]]
