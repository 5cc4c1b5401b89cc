"""The toric coordinate ring as a semigroup algebra.

Graded pieces are ordered lists of lattice points and multiplication is point
addition. Two gradings are supported: the Z-graded ring of a normal lattice
polytope (after contraction), and the Z^s-graded Cox ring of a product of
projective spaces, where points are full exponent vectors of the homogeneous
variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from toricimplicit.arith import SparsePoly, grlex_key
from toricimplicit.polytope import (
    LatticePolytope,
    contraction,
    is_normal,
    lattice_points,
    newton_polytope,
)


class NotHomogeneousOnPolytope(ValueError):
    pass


class RingMismatch(ValueError):
    pass


class NonNormalPolytope(ValueError):
    pass


def _compositions(total: int, parts: int):
    """Exponent vectors of length `parts` summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class ToricRing:
    """Graded semigroup ring; use ``from_polytope`` or ``cox``."""

    def __init__(self, *, base=None, factor=1, translation=None, ranks=None):
        if (base is None) == (ranks is None):
            raise ValueError("give either a polytope or block ranks")
        self.base: LatticePolytope | None = base
        self.factor = factor
        self.translation = tuple(translation) if translation is not None else None
        self.ranks = tuple(ranks) if ranks is not None else None
        self._basis: dict = {}
        self._index: dict = {}

    @classmethod
    def from_polytope(cls, base: LatticePolytope, factor: int = 1, translation=None, check_normal=True):
        if check_normal:
            cert = is_normal(base)
            if not cert:
                raise NonNormalPolytope(f"polytope is not normal (level {cert.level}, point {cert.witness})")
        if translation is None:
            translation = (0,) * base.dim
        return cls(base=base, factor=factor, translation=translation)

    @classmethod
    def cox(cls, ranks: Sequence[int]):
        if not ranks or any(r < 1 for r in ranks):
            raise ValueError("block ranks must be positive")
        return cls(ranks=ranks)

    # grading ------------------------------------------------------------
    @property
    def multigraded(self) -> bool:
        return self.ranks is not None

    @property
    def grading(self):
        return "Z" if self.ranks is None else ("Z^s", self.ranks)

    @property
    def unit_degree(self):
        return 1 if self.ranks is None else tuple(1 for _ in self.ranks)

    @property
    def zero_degree(self):
        return 0 if self.ranks is None else tuple(0 for _ in self.ranks)

    def norm_degree(self, nu):
        if self.ranks is None:
            if isinstance(nu, (tuple, list)):
                if len(nu) != 1:
                    raise ValueError("this ring is Z-graded")
                nu = nu[0]
            return int(nu)
        nu = tuple(int(x) for x in (nu if isinstance(nu, (tuple, list)) else (nu,)))
        if len(nu) != len(self.ranks):
            raise ValueError(f"expected a degree with {len(self.ranks)} components")
        return nu

    def add_degrees(self, a, b):
        if self.ranks is None:
            return a + b
        return tuple(x + y for x, y in zip(a, b))

    def sub_degrees(self, a, b):
        if self.ranks is None:
            return a - b
        return tuple(x - y for x, y in zip(a, b))

    def scale_degree(self, k: int, a):
        if self.ranks is None:
            return k * a
        return tuple(k * x for x in a)

    def is_valid_degree(self, nu) -> bool:
        if self.ranks is None:
            return nu >= 0
        return all(x >= 0 for x in nu)

    def degree_of(self, point):
        """Multidegree of an exponent vector of the Cox ring."""
        if self.ranks is None:
            raise TypeError("Z-graded points do not determine their degree")
        out, pos = [], 0
        for r in self.ranks:
            out.append(sum(point[pos:pos + r + 1]))
            pos += r + 1
        return tuple(out)

    # bases --------------------------------------------------------------
    @property
    def nvars_source(self) -> int:
        return self.base.dim if self.ranks is None else sum(r + 1 for r in self.ranks)

    def basis(self, nu) -> list:
        nu = self.norm_degree(nu)
        if nu in self._basis:
            return self._basis[nu]
        if not self.is_valid_degree(nu):
            pts = []
        elif self.ranks is None:
            pts = lattice_points(self.base, nu)
        else:
            blocks = [list(_compositions(k, r + 1)) for k, r in zip(nu, self.ranks)]
            pts = sorted((sum(combo, ()) for combo in itertools.product(*blocks)), key=grlex_key)
        self._basis[nu] = pts
        self._index[nu] = {p: i for i, p in enumerate(pts)}
        return pts

    def index(self, nu) -> dict:
        nu = self.norm_degree(nu)
        if nu not in self._index:
            self.basis(nu)
        return self._index[nu]

    @property
    def coords(self) -> list:
        """Points labelling the variables T_0, ..., T_N."""
        if self.ranks is None:
            return self.basis(1)
        n = self.nvars_source
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]

    def __repr__(self) -> str:
        if self.ranks is None:
            return f"ToricRing(base={self.base.vertices}, factor={self.factor})"
        return f"ToricRing(cox ranks={self.ranks})"


@dataclass(frozen=True, eq=False)
class RingElement:
    ring: ToricRing
    degree: object
    coeffs: Mapping[tuple, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        idx = self.ring.index(self.degree)
        clean = {}
        for p, c in self.coeffs.items():
            if p not in idx:
                raise NotHomogeneousOnPolytope(f"point {p} is not in degree {self.degree}")
            c = Fraction(c)
            if c:
                clean[p] = c
        object.__setattr__(self, "coeffs", clean)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingElement)
            and self.ring is other.ring
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((id(self.ring), self.degree, frozenset(self.coeffs.items())))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def _check(self, other: "RingElement") -> None:
        if not isinstance(other, RingElement) or other.ring is not self.ring:
            raise RingMismatch("elements live in different rings")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("cannot add elements of different degrees")
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) + c
        return RingElement(self.ring, self.degree, out)

    def __neg__(self) -> "RingElement":
        return RingElement(self.ring, self.degree, {p: -c for p, c in self.coeffs.items()})

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def scale(self, c) -> "RingElement":
        c = Fraction(c)
        return RingElement(self.ring, self.degree, {p: c * v for p, v in self.coeffs.items()})

    def __mul__(self, other: "RingElement") -> "RingElement":
        return multiply(self, other)

    def vector(self) -> list:
        return [self.coeffs.get(p, Fraction(0)) for p in self.ring.basis(self.degree)]

    @classmethod
    def from_vector(cls, ring: ToricRing, degree, vec: Sequence) -> "RingElement":
        return cls(ring, degree, {p: Fraction(c) for p, c in zip(ring.basis(degree), vec) if c})

    @classmethod
    def monomial(cls, ring: ToricRing, point: tuple, degree) -> "RingElement":
        return cls(ring, degree, {tuple(point): Fraction(1)})

    def evaluate(self, at: Sequence) -> Fraction:
        """Value at a source point (torus point, or homogeneous point for Cox rings)."""
        total = Fraction(0)
        for p, c in self.coeffs.items():
            term = c
            for x, e in zip(at, p):
                if e:
                    term *= Fraction(x) ** e
            total += term
        return total

    def to_source_poly(self) -> SparsePoly:
        """The element as a polynomial in the source variables, translation restored."""
        ring = self.ring
        if ring.multigraded:
            return SparsePoly(ring.nvars_source, self.coeffs)
        shift = ring.translation
        k = self.degree
        d = ring.factor
        # the translation belongs to degree d; other degrees get a proportional shift when integral
        if all((k * t) % d == 0 for t in shift):
            shift = tuple(k * t // d for t in shift)
        else:
            shift = (0,) * len(shift)
        return SparsePoly(
            ring.base.dim,
            {tuple(a + s for a, s in zip(p, shift)): c for p, c in self.coeffs.items()},
        )

    def __repr__(self) -> str:
        terms = " + ".join(f"{c}*{p}" for p, c in sorted(self.coeffs.items(), key=lambda t: grlex_key(t[0])))
        return f"RingElement(deg={self.degree}: {terms or '0'})"


def multiply(a: RingElement, b: RingElement) -> RingElement:
    """Product in the semigroup ring: degrees add, points add."""
    a._check(b)
    ring = a.ring
    deg = ring.add_degrees(a.degree, b.degree)
    out: dict = {}
    for p, c in a.coeffs.items():
        for q, e in b.coeffs.items():
            r = tuple(x + y for x, y in zip(p, q))
            out[r] = out.get(r, 0) + c * e
    return RingElement(ring, deg, out)


def hilbert(ring: ToricRing, nu) -> int:
    return len(ring.basis(nu))


def _support(polys: Sequence[SparsePoly]) -> set:
    pts = set()
    for p in polys:
        pts.update(p.terms)
    return pts


def _ring_from_polytope(polytope: LatticePolytope) -> ToricRing:
    data = contraction(polytope)
    return ToricRing.from_polytope(data.base, data.factor, data.translation)


def _polytope_arg(polys, polytope):
    if polytope is None:
        return newton_polytope(polys)
    if isinstance(polytope, LatticePolytope):
        return polytope
    return LatticePolytope(polytope)


def build_ring(polys: Sequence[SparsePoly], polytope=None) -> tuple:
    """Ring on the contraction of the Newton polytope (or of `polytope`) and the h_i of degree d."""
    P = _polytope_arg(polys, polytope)
    for f in polys:
        for a in f.terms:
            if not P.contains(a):
                raise NotHomogeneousOnPolytope(f"exponent {a} lies outside the polytope")
    ring = _ring_from_polytope(P)
    shift = ring.translation
    h = [
        RingElement(ring, ring.factor, {tuple(x - s for x, s in zip(a, shift)): c for a, c in f.terms.items()})
        for f in polys
    ]
    return ring, h


def build_cox_ring(polys: Sequence[SparsePoly], ranks: Sequence[int]) -> tuple:
    """Cox ring of P^{r_1} x ... x P^{r_s}; the polys must share one multidegree."""
    ring = ToricRing.cox(ranks)
    if any(p.nvars != ring.nvars_source for p in polys):
        raise ValueError(f"expected polynomials in {ring.nvars_source} variables")
    degrees = {ring.degree_of(a) for p in polys for a in p.terms}
    if len(degrees) != 1:
        raise NotHomogeneousOnPolytope(f"polynomials are not multihomogeneous of one degree: {sorted(degrees)}")
    (deg,) = degrees
    h = [RingElement(ring, deg, dict(p.terms)) for p in polys]
    return ring, h


def _pair_shift(ring: ToricRing, support: set, k: int):
    """An integer shift putting `support` inside k*base, or None."""
    base = ring.base
    pts = sorted(support)
    lo = [max(p[i] for p in pts) - k * max(v[i] for v in base.vertices) for i in range(base.dim)]
    hi = [min(p[i] for p in pts) - k * min(v[i] for v in base.vertices) for i in range(base.dim)]
    if any(a > b for a, b in zip(lo, hi)):
        return None
    preferred = ring.translation if k == ring.factor else None
    candidates = itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)])
    if preferred is not None:
        candidates = itertools.chain([preferred], candidates)
    for shift in candidates:
        if all(base.contains(tuple(x - s for x, s in zip(p, shift)), k) for p in pts):
            return tuple(shift)
    return None


def build_pair_ring(pairs: Sequence[tuple], polytope=None) -> tuple:
    """Ring for the (P^1)^n codomain: hull of all numerators and denominators.

    Each pair (f_i, g_i) gets the least degree d_i for which both fit, after a
    common monomial shift, in d_i times the contracted polytope.
    """
    polys = [p for pair in pairs for p in pair]
    P = _polytope_arg(polys, polytope)
    ring = _ring_from_polytope(P)
    out = []
    for f, g in pairs:
        supp = _support([f, g])
        if not supp:
            raise ValueError("a pair with both entries zero")
        for k in range(1, 8 * ring.factor + 8):
            shift = _pair_shift(ring, supp, k)
            if shift is not None:
                break
        else:
            raise NotHomogeneousOnPolytope("pair does not fit in any multiple of the polytope")
        conv = lambda p: RingElement(  # noqa: E731
            ring, k, {tuple(x - s for x, s in zip(a, shift)): c for a, c in p.terms.items()}
        )
        out.append((conv(f), conv(g)))
    return ring, out


# ---------------------------------------------------------------------------
# toric ideal


@dataclass(frozen=True)
class ToricIdeal:
    generators: list
    degree_bound: int
    complete: bool

    def __iter__(self):
        return iter(self.generators)

    def __len__(self) -> int:
        return len(self.generators)


def toric_ideal(ring: ToricRing, degree_bound: int = 3) -> ToricIdeal:
    """Minimal binomial generators of degree <= degree_bound.

    In each degree k, multisets of variables with the same point sum form a
    fibre; moves coming from lower-degree generators connect parts of the
    fibre, and one new binomial is needed per extra connected component.
    Lattice polygons have ideals generated in degree <= 3, so the output is
    complete there once the bound reaches 3.
    """
    if degree_bound < 2:
        raise ValueError("degree_bound must be at least 2")
    if ring.multigraded:
        return ToricIdeal([], degree_bound, True)
    coords = ring.coords
    nv = len(coords)
    dim = ring.base.dim
    gens_exps: list = []
    for k in range(2, degree_bound + 1):
        fibres: dict = {}
        for combo in itertools.combinations_with_replacement(range(nv), k):
            pt = tuple(sum(coords[i][j] for i in combo) for j in range(dim))
            exp = [0] * nv
            for i in combo:
                exp[i] += 1
            fibres.setdefault(pt, []).append(tuple(exp))
        for pt in sorted(fibres, key=grlex_key):
            members = sorted(fibres[pt], key=grlex_key)
            if len(members) < 2:
                continue
            parent = list(range(len(members)))

            def find(i):
                while parent[i] != i:
                    parent[i] = parent[parent[i]]
                    i = parent[i]
                return i

            pos = {m: i for i, m in enumerate(members)}
            for u, v in gens_exps:
                for i, m in enumerate(members):
                    rest = tuple(a - b for a, b in zip(m, u))
                    if min(rest) < 0:
                        continue
                    other = tuple(a + b for a, b in zip(rest, v))
                    j = pos.get(other)
                    if j is not None:
                        parent[find(i)] = find(j)
            roots: dict = {}
            for i in range(len(members)):
                roots.setdefault(find(i), i)
            reps = sorted(roots.values())
            for j in reps[1:]:
                u, v = members[reps[0]], members[j]
                gens_exps.append((u, v))
                gens_exps.append((v, u))
    gens = []
    for u, v in gens_exps[::2]:
        gens.append(SparsePoly(nv, {u: Fraction(1), v: Fraction(-1)}))
    complete = dim <= 2 and degree_bound >= 3
    return ToricIdeal(gens, degree_bound, complete)
