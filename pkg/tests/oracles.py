"""Independent reference implementations used to cross-check the package."""

import itertools
from fractions import Fraction

import sympy

from toricimplicit.arith import SparsePoly


def leibniz_det(rows) -> Fraction:
    n = len(rows)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i, j in itertools.combinations(range(n), 2) if perm[i] > perm[j])
        term = Fraction(-1 if inversions % 2 else 1)
        for i, j in enumerate(perm):
            term *= rows[i][j]
        total += term
    return total


def sympy_nullspace_dim(rows) -> int:
    return len(sympy.Matrix(rows).nullspace())


def _symbols(n):
    return sympy.symbols(f"x0:{n}")


def to_sympy(p: SparsePoly):
    xs = _symbols(p.nvars)
    return sympy.Poly(
        sum((sympy.Rational(c.numerator, c.denominator) * sympy.prod(x**k for x, k in zip(xs, e))
             for e, c in p.terms.items()), sympy.Integer(0)),
        *xs,
    )


def from_sympy(poly, nvars: int) -> SparsePoly:
    return SparsePoly(nvars, {tuple(e): Fraction(int(c.p), int(c.q)) for e, c in poly.terms()})


def sympy_gcd(a: SparsePoly, b: SparsePoly) -> SparsePoly:
    return from_sympy(sympy.gcd(to_sympy(a), to_sympy(b)), a.nvars)


def brute_lattice_points(vertices, k: int) -> list:
    """Lattice points of k*conv(vertices) in the plane, by the supporting-line test on vertex pairs."""
    pts = [(k * x, k * y) for x, y in vertices]
    if k == 0:
        return [(0, 0)]
    lines = []
    for a, b in itertools.combinations(pts, 2):
        side = [(b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]) for q in pts]
        if all(s >= 0 for s in side):
            lines.append((a, b, 1))
        elif all(s <= 0 for s in side):
            lines.append((a, b, -1))
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    out = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            if all(sgn * ((b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0])) >= 0 for a, b, sgn in lines):
                out.append((x, y))
    return out
