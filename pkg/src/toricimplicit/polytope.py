"""Lattice polytopes: hulls, lattice points, Ehrhart counts, contraction, normality."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from toricimplicit.arith import SparsePoly, grlex_key


class DegeneratePolytope(ValueError):
    pass


class NotSurfaceCase(ValueError):
    pass


def _affine_rank(points: Sequence[Sequence[int]]) -> int:
    if not points:
        return -1
    base = points[0]
    rows = [[Fraction(a - b) for a, b in zip(p, base)] for p in points[1:]]
    rank = 0
    ncols = len(base)
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i][c]:
                f = rows[i][c] / rows[rank][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _primitive(vec: Sequence[int]) -> tuple:
    g = 0
    for x in vec:
        g = math.gcd(g, x)
    return tuple(x // g for x in vec) if g else tuple(vec)


def _hull_2d(points: Iterable[Sequence[int]]) -> list:
    """Andrew's monotone chain; counter-clockwise vertices without collinear points."""
    pts = sorted(set(tuple(p) for p in points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _normal_through(points: Sequence[Sequence[int]]) -> tuple | None:
    """Integer normal of the hyperplane through dim affinely independent points."""
    base = points[0]
    vecs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    dim = len(base)
    normal = []
    for j in range(dim):
        minor = [[v[k] for k in range(dim) if k != j] for v in vecs]
        normal.append((-1) ** j * _int_det(minor))
    if not any(normal):
        return None
    return _primitive(normal)


def _int_det(m: list) -> int:
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            total += (-1) ** j * m[0][j] * _int_det(minor)
    return total


def _facets_general(points: list, dim: int) -> list:
    facets = {}
    for combo in itertools.combinations(points, dim):
        normal = _normal_through(combo)
        if normal is None:
            continue
        vals = [sum(n * x for n, x in zip(normal, p)) for p in points]
        off = sum(n * x for n, x in zip(normal, combo[0]))
        if all(v >= off for v in vals):
            facets[normal] = off
        elif all(v <= off for v in vals):
            facets[tuple(-n for n in normal)] = -off
    return sorted(facets.items())


class LatticePolytope:
    """Full-dimensional convex lattice polytope {x : <normal, x> >= offset for all facets}."""

    __slots__ = ("dim", "vertices", "facets", "_cache")

    def __init__(self, points: Iterable[Sequence[int]]):
        pts = sorted(set(tuple(int(x) for x in p) for p in points))
        if not pts:
            raise DegeneratePolytope("empty point set")
        dim = len(pts[0])
        if dim == 0 or _affine_rank(pts) < dim:
            raise DegeneratePolytope("the support is not full-dimensional")
        self.dim = dim
        if dim == 1:
            lo, hi = pts[0], pts[-1]
            self.vertices = [lo, hi]
            self.facets = [((1,), lo[0]), ((-1,), -hi[0])]
        elif dim == 2:
            verts = _hull_2d(pts)
            self.vertices = verts
            facets = []
            for i, v in enumerate(verts):
                w = verts[(i + 1) % len(verts)]
                normal = _primitive((-(w[1] - v[1]), w[0] - v[0]))
                facets.append((normal, normal[0] * v[0] + normal[1] * v[1]))
            self.facets = facets
        else:
            self.facets = _facets_general(pts, dim)
            verts = []
            for p in pts:
                tight = [n for n, off in self.facets if sum(a * b for a, b in zip(n, p)) == off]
                if len(tight) >= dim and _affine_rank([(0,) * dim] + tight) == dim:
                    verts.append(p)
            self.vertices = sorted(verts, key=grlex_key)
        self._cache = {}
        self._check()

    def _check(self) -> None:
        for v in self.vertices:
            if not self.contains(v):
                raise AssertionError("vertex violates a facet inequality")
        for normal, off in self.facets:
            on = [v for v in self.vertices if sum(a * b for a, b in zip(normal, v)) == off]
            if len(on) < self.dim:
                raise AssertionError("facet is not supported by enough vertices")

    @classmethod
    def from_polys(cls, polys: Sequence[SparsePoly]) -> "LatticePolytope":
        return newton_polytope(polys)

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticePolytope) and sorted(self.vertices) == sorted(other.vertices)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.vertices)))

    def __repr__(self) -> str:
        return f"LatticePolytope({self.vertices})"

    def contains(self, point: Sequence[int], k: int = 1, strict: bool = False) -> bool:
        for normal, off in self.facets:
            v = sum(a * b for a, b in zip(normal, point))
            if v < k * off or (strict and v == k * off):
                return False
        return True

    def bounding_box(self, k: int = 1) -> list:
        return [
            (k * min(v[i] for v in self.vertices), k * max(v[i] for v in self.vertices))
            for i in range(self.dim)
        ]

    def scaled(self, k: int) -> "LatticePolytope":
        return LatticePolytope([tuple(k * x for x in v) for v in self.vertices])

    def translated(self, shift: Sequence[int]) -> "LatticePolytope":
        return LatticePolytope([tuple(x + s for x, s in zip(v, shift)) for v in self.vertices])

    def _scan(self, k: int, strict: bool) -> list:
        key = (k, strict)
        if key in self._cache:
            return self._cache[key]
        box = self.bounding_box(k)
        if self.dim == 2:
            pts = []
            (x0, x1), (y0, y1) = box
            for x in range(x0, x1 + 1):
                lo, hi = y0, y1
                for (a, b), off in self.facets:
                    # a*x + b*y >= k*off, strict if requested
                    rhs = k * off - a * x
                    if b > 0:
                        bound = -((-rhs) // b)
                        if strict and bound * b == rhs:
                            bound += 1
                        lo = max(lo, bound)
                    elif b < 0:
                        bound = rhs // b
                        if strict and bound * b == rhs:
                            bound -= 1
                        hi = min(hi, bound)
                    elif rhs > 0 or (strict and rhs == 0):
                        lo, hi = 1, 0
                pts.extend((x, y) for y in range(lo, hi + 1))
        else:
            ranges = [range(a, b + 1) for a, b in box]
            pts = [p for p in itertools.product(*ranges) if self.contains(p, k, strict)]
        pts.sort(key=grlex_key)
        self._cache[key] = pts
        return pts


def newton_polytope(polys: Sequence[SparsePoly]) -> LatticePolytope:
    """Convex hull of the union of the supports."""
    if not polys:
        raise ValueError("need at least one polynomial")
    nvars = polys[0].nvars
    if any(p.nvars != nvars for p in polys):
        raise ValueError("polynomials of different arity")
    pts = set()
    for p in polys:
        pts.update(p.terms)
    if not pts:
        raise DegeneratePolytope("all polynomials are zero")
    return LatticePolytope(pts)


def lattice_points(P: LatticePolytope, k: int = 1) -> list:
    """Lattice points of k*P in graded lexicographic order."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return list(P._scan(k, False))


def interior_points(P: LatticePolytope, k: int = 1) -> list:
    if k < 0:
        raise ValueError("k must be non-negative")
    return list(P._scan(k, True))


def ehrhart(P: LatticePolytope, k: int) -> int:
    return len(P._scan(k, False))


def boundary_count(P: LatticePolytope, k: int = 1) -> int:
    return ehrhart(P, k) - len(P._scan(k, True))


def gamma(P: LatticePolytope) -> int:
    """Largest k >= 0 such that k*P has no interior lattice point."""
    for k in range(1, P.dim + 2):
        if P._scan(k, True):
            return k - 1
    raise AssertionError("interior of (dim+1)*P is empty, which cannot happen for a lattice polytope")


@dataclass(frozen=True)
class ContractionData:
    base: LatticePolytope
    factor: int
    translation: tuple


def contraction(P: LatticePolytope) -> ContractionData:
    """Largest d with P = d*base + translation for a lattice polytope base."""
    shift = tuple(min(v[i] for v in P.vertices) for i in range(P.dim))
    moved = [tuple(x - s for x, s in zip(v, shift)) for v in P.vertices]
    g = 0
    for v in moved:
        for x in v:
            g = math.gcd(g, x)
    for d in sorted((q for q in range(1, g + 1) if g % q == 0), reverse=True):
        if all(x % d == 0 for v in moved for x in v):
            base = LatticePolytope([tuple(x // d for x in v) for v in moved])
            return ContractionData(base, d, shift)
    raise AssertionError("unreachable: d = 1 always works")


@dataclass(frozen=True)
class NormalityResult:
    normal: bool
    level: int | None = None
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.normal


def is_normal(P: LatticePolytope) -> NormalityResult:
    """Polygons are always normal; in dim >= 3 check levels 2 .. dim-1."""
    if P.dim <= 2:
        return NormalityResult(True)
    base = lattice_points(P, 1)
    sums = {tuple([0] * P.dim)}
    for m in range(1, P.dim):
        sums = {tuple(a + b for a, b in zip(s, q)) for s in sums for q in base}
        if m == 1:
            continue
        for pt in lattice_points(P, m):
            if pt not in sums:
                return NormalityResult(False, m, pt)
    return NormalityResult(True)


def normalized_area(P: LatticePolytope) -> int:
    """Twice the Euclidean area of a polygon."""
    if P.dim != 2:
        raise NotSurfaceCase("normalized area is defined for polygons only")
    v = P.vertices
    total = 0
    for i in range(len(v)):
        x0, y0 = v[i]
        x1, y1 = v[(i + 1) % len(v)]
        total += x0 * y1 - x1 * y0
    return abs(total)
