"""Exact rational arithmetic: sparse polynomials, kernels, determinants and gcds.

Coefficients are ``fractions.Fraction`` values. Monomials are tuples of
non-negative exponents. Every canonical ordering uses the graded
lexicographic order: total degree first, then exponent tuples compared
lexicographically (first variable most significant).
"""

from __future__ import annotations

import heapq
import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Rational = Fraction
Monomial = tuple


class NonSquareError(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


def grlex_key(exps: Sequence[int]) -> tuple:
    return (sum(exps), tuple(exps))


def to_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating point values are not exact")
    return Fraction(value)


class SparsePoly:
    """Multivariate polynomial over Q stored as {exponent tuple: Fraction}.

    Instances are treated as immutable: arithmetic always builds new objects.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping | Iterable | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        clean: dict = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for exps, coeff in items:
                exps = tuple(int(x) for x in exps)
                if len(exps) != nvars:
                    raise DimensionMismatch(f"monomial {exps} does not have {nvars} exponents")
                if any(x < 0 for x in exps):
                    raise ValueError(f"negative exponent in {exps}")
                c = clean.get(exps, 0) + to_rational(coeff)
                if c:
                    clean[exps] = c
                else:
                    clean.pop(exps, None)
        self.nvars = nvars
        self.terms = clean
        self._hash = None

    @classmethod
    def _trusted(cls, nvars: int, terms: dict) -> "SparsePoly":
        # terms already has tuple keys of the right length and nonzero Fraction values
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        obj._hash = None
        return obj

    # construction helpers

    @classmethod
    def zero(cls, nvars: int) -> "SparsePoly":
        return cls._trusted(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value) -> "SparsePoly":
        c = to_rational(value)
        return cls._trusted(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def one(cls, nvars: int) -> "SparsePoly":
        return cls.constant(nvars, 1)

    @classmethod
    def variable(cls, nvars: int, index: int) -> "SparsePoly":
        exps = [0] * nvars
        exps[index] = 1
        return cls._trusted(nvars, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> "SparsePoly":
        return cls(len(exps), {tuple(exps): coeff})

    @classmethod
    def linear_form(cls, coeffs: Sequence) -> "SparsePoly":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            c = to_rational(c)
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls._trusted(n, terms)

    # basic queries

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, SparsePoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == SparsePoly.constant(self.nvars, other).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def total_degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, index: int) -> int:
        return max((e[index] for e in self.terms), default=-1)

    def block_degrees(self, blocks: Sequence[Sequence[int]]) -> tuple:
        return tuple(max((sum(e[i] for i in blk) for e in self.terms), default=-1) for blk in blocks)

    def is_homogeneous(self, indices: Sequence[int] | None = None) -> bool:
        idx = range(self.nvars) if indices is None else indices
        degs = {sum(e[i] for i in idx) for e in self.terms}
        return len(degs) <= 1

    def support(self) -> list:
        return sorted(self.terms, key=grlex_key)

    def sorted_terms(self, descending: bool = True) -> list:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=descending)

    def leading_term(self) -> tuple:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    # arithmetic

    def _coerce(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            if other.nvars != self.nvars:
                raise DimensionMismatch("polynomials live in rings of different arity")
            return other
        if isinstance(other, (int, Fraction)):
            return SparsePoly.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return SparsePoly._trusted(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly._trusted(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, factor) -> "SparsePoly":
        f = to_rational(factor)
        if not f:
            return SparsePoly.zero(self.nvars)
        return SparsePoly._trusted(self.nvars, {e: c * f for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, 0) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    terms.pop(e, None)
        return SparsePoly._trusted(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = SparsePoly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_monomial(self, exps: Sequence[int], coeff=1) -> "SparsePoly":
        c0 = to_rational(coeff)
        if not c0:
            return SparsePoly.zero(self.nvars)
        return SparsePoly._trusted(
            self.nvars, {tuple(a + b for a, b in zip(e, exps)): c * c0 for e, c in self.terms.items()}
        )

    def divexact(self, other: "SparsePoly") -> "SparsePoly":
        """Exact quotient; raises ArithmeticError if other does not divide self."""
        other = self._coerce(other)
        quotient, remainder = divide(self, other)
        if remainder:
            raise ArithmeticError("polynomial division is not exact")
        return quotient

    def __floordiv__(self, other):
        return self.divexact(other)

    # evaluation and composition

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != self.nvars:
            raise DimensionMismatch("point has the wrong length")
        pt = [to_rational(x) for x in point]
        total = Fraction(0)
        powers: list[dict] = [{} for _ in range(self.nvars)]
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    cache = powers[i]
                    v = cache.get(k)
                    if v is None:
                        v = pt[i] ** k
                        cache[k] = v
                    term *= v
            total += term
        return total

    def substitute(self, images: Sequence["SparsePoly"]) -> "SparsePoly":
        """Compose: replace variable i by images[i] (all images share one arity)."""
        if len(images) != self.nvars:
            raise DimensionMismatch("need one image per variable")
        if not images:
            return self
        n = images[0].nvars
        power_cache: list[dict] = [{0: SparsePoly.one(n), 1: img} for img in images]

        def power(i: int, k: int) -> SparsePoly:
            cache = power_cache[i]
            if k not in cache:
                half = power(i, k // 2)
                val = half * half
                if k % 2:
                    val = val * images[i]
                cache[k] = val
            return cache[k]

        result = SparsePoly.zero(n)
        for e, c in self.terms.items():
            term = SparsePoly.constant(n, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def derivative(self, index: int) -> "SparsePoly":
        terms = {}
        for e, c in self.terms.items():
            k = e[index]
            if k:
                f = list(e)
                f[index] = k - 1
                terms[tuple(f)] = c * k
        return SparsePoly._trusted(self.nvars, terms)

    def homogenize(self, degree: int | None = None) -> "SparsePoly":
        """Append one variable making every term of total degree `degree`."""
        d = self.total_degree() if degree is None else degree
        terms = {}
        for e, c in self.terms.items():
            if sum(e) > d:
                raise ValueError("degree too small to homogenize")
            terms[e + (d - sum(e),)] = c
        return SparsePoly._trusted(self.nvars + 1, terms)

    # normalization

    def content(self) -> Fraction:
        """Positive rational c with self / c an integer polynomial of content 1."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "SparsePoly":
        """Integer polynomial with content 1 and positive grlex-leading coefficient."""
        if not self.terms:
            return self
        c = self.content()
        if self.leading_term()[1] < 0:
            c = -c
        return self.scale(1 / c)

    def monic(self) -> "SparsePoly":
        return self.scale(1 / self.leading_term()[1])

    def integer_terms(self) -> dict:
        """Terms of the primitive integer multiple, as {exps: int}."""
        p = self.primitive()
        return {e: int(c) for e, c in p.terms.items()}

    # printing

    def to_string(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{i}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            mag = abs(c)
            sign = "-" if c < 0 else "+"
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"SparsePoly({self.nvars}, {self.to_string()!r})"

    def __str__(self) -> str:
        return self.to_string()


def divide(p: SparsePoly, q: SparsePoly) -> tuple[SparsePoly, SparsePoly]:
    """Multivariate division by the grlex leading term of q: p = quotient*q + remainder."""
    if not q.terms:
        raise ZeroDivisionError("division by the zero polynomial")
    lq, cq = q.leading_term()
    rest = [(e, c) for e, c in q.terms.items() if e != lq]
    work = dict(p.terms)
    heap = [(-sum(e), tuple(-x for x in e)) for e in work]
    heapq.heapify(heap)
    quotient: dict = {}
    remainder: dict = {}
    while heap:
        _, neg = heapq.heappop(heap)
        e = tuple(-x for x in neg)
        c = work.pop(e, None)
        if not c:
            continue
        shift = tuple(a - b for a, b in zip(e, lq))
        if min(shift) < 0:
            remainder[e] = c
            continue
        f = c / cq
        quotient[shift] = f
        for e2, c2 in rest:
            m = tuple(a + b for a, b in zip(e2, shift))
            old = work.get(m)
            new = (old or 0) - f * c2
            if new:
                if old is None:
                    heapq.heappush(heap, (-sum(m), tuple(-x for x in m)))
                work[m] = new
            else:
                work.pop(m, None)
    n = p.nvars
    return SparsePoly._trusted(n, quotient), SparsePoly._trusted(n, remainder)


# ---------------------------------------------------------------------------
# Integer polynomial kernels (dict of exponent tuple -> int) used by gcd and
# fraction-free determinants.


def _ip_add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) + sign * c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def _ip_mul(a: dict, b: dict) -> dict:
    if len(a) > len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _ip_divexact(a: dict, b: dict) -> dict:
    """Exact quotient of integer polynomials (raises if not exact)."""
    if not a:
        return {}
    lb = max(b, key=grlex_key)
    cb = b[lb]
    rest = [(e, c) for e, c in b.items() if e != lb]
    work = dict(a)
    heap = [(-sum(e), tuple(-x for x in e)) for e in work]
    heapq.heapify(heap)
    quotient = {}
    while heap:
        _, neg = heapq.heappop(heap)
        e = tuple(-x for x in neg)
        c = work.pop(e, None)
        if not c:
            continue
        shift = tuple(x - y for x, y in zip(e, lb))
        if min(shift) < 0:
            raise ArithmeticError("inexact polynomial division")
        f, r = divmod(c, cb)
        if r:
            raise ArithmeticError("inexact coefficient division")
        quotient[shift] = f
        for e2, c2 in rest:
            m = tuple(x + y for x, y in zip(e2, shift))
            old = work.get(m)
            new = (old or 0) - f * c2
            if new:
                if old is None:
                    heapq.heappush(heap, (-sum(m), tuple(-x for x in m)))
                work[m] = new
            else:
                work.pop(m, None)
    return quotient


def _int_content(a: dict) -> int:
    g = 0
    for c in a.values():
        g = math.gcd(g, c)
        if g == 1:
            break
    return g


def _to_int_poly(p: SparsePoly) -> tuple[dict, Fraction]:
    """Return (integer terms, scale) with p = scale * integer poly."""
    if not p.terms:
        return {}, Fraction(1)
    den = 1
    for c in p.terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = {e: int(c * den) for e, c in p.terms.items()}
    return ints, Fraction(1, den)


# ---------------------------------------------------------------------------
# gcd by primitive-part recursion on the last variable


def _split(a: dict, v: int) -> dict:
    """Group terms by the exponent of variable v (that exponent zeroed in keys)."""
    out: dict = {}
    for e, c in a.items():
        k = e[v]
        key = e[:v] + (0,) + e[v + 1:]
        out.setdefault(k, {})[key] = c
    return out


def _deg_in(a: dict, v: int) -> int:
    return max((e[v] for e in a), default=-1)


def _leading_in(a: dict, v: int) -> tuple[int, dict]:
    d = _deg_in(a, v)
    lc = {e[:v] + (0,) + e[v + 1:]: c for e, c in a.items() if e[v] == d}
    return d, lc


def _shift_var(a: dict, v: int, k: int) -> dict:
    if not k:
        return a
    return {e[:v] + (e[v] + k,) + e[v + 1:]: c for e, c in a.items()}


def _top_var(a: dict) -> int:
    top = -1
    for e in a:
        for i in range(len(e) - 1, top, -1):
            if e[i]:
                top = i
                break
    return top


def _int_gcd_poly(a: dict, b: dict, nvars: int) -> dict:
    """gcd of two nonzero integer polynomials, up to sign."""
    v = max(_top_var(a), _top_var(b))
    if v < 0:
        return {(0,) * nvars: math.gcd(_int_content(a), _int_content(b))}
    ca = _content_in(a, v, nvars)
    cb = _content_in(b, v, nvars)
    c = _int_gcd_poly(ca, cb, nvars)
    pa = _ip_divexact(a, ca)
    pb = _ip_divexact(b, cb)
    if _deg_in(pa, v) <= 0 or _deg_in(pb, v) <= 0:
        # one primitive part is constant in v, hence a unit for the v-part
        return c
    g = _prs_gcd(pa, pb, v, nvars)
    return _ip_mul(c, g)


def _content_in(a: dict, v: int, nvars: int) -> dict:
    """gcd of the coefficients of a viewed as a polynomial in variable v."""
    coeffs = sorted(_split(a, v).values(), key=len)
    g = coeffs[0]
    for c in coeffs[1:]:
        if len(g) == 1 and next(iter(g)) == (0,) * nvars:
            break
        g = _int_gcd_poly(g, c, nvars)
    if len(g) == 1 and next(iter(g)) == (0,) * nvars:
        # constant gcd: the integer content of all coefficients
        return {(0,) * nvars: _int_content(a)}
    return _normalize_sign(g)


def _normalize_sign(a: dict) -> dict:
    lead = max(a, key=grlex_key)
    return {e: -c for e, c in a.items()} if a[lead] < 0 else a


def _prs_gcd(a: dict, b: dict, v: int, nvars: int) -> dict:
    """Primitive PRS gcd of two polynomials primitive with respect to v."""
    if _deg_in(a, v) < _deg_in(b, v):
        a, b = b, a
    while True:
        r = _pseudo_rem(a, b, v)
        if not r:
            return b
        if _deg_in(r, v) == 0:
            return {(0,) * nvars: 1}
        a, b = b, _ip_divexact(r, _content_in(r, v, nvars))


def _pseudo_rem(a: dict, b: dict, v: int) -> dict:
    db, lcb = _leading_in(b, v)
    r = a
    while r:
        dr, lcr = _leading_in(r, v)
        if dr < db:
            break
        r = _ip_add(_ip_mul(r, lcb), _shift_var(_ip_mul(b, lcr), v, dr - db), -1)
        g = _int_content(r) if r else 1
        if g > 1:
            r = {e: c // g for e, c in r.items()}
    return r


def poly_gcd(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    """Greatest common divisor, primitive over Z with positive grlex leading coefficient."""
    if p.nvars != q.nvars:
        raise DimensionMismatch("gcd of polynomials of different arity")
    if not p.terms:
        return q.primitive()
    if not q.terms:
        return p.primitive()
    a, _ = _to_int_poly(p)
    b, _ = _to_int_poly(q)
    g = _int_gcd_poly(a, b, p.nvars)
    return SparsePoly(p.nvars, g).primitive()


def squarefree_part(p: SparsePoly) -> SparsePoly:
    """p divided by gcd(p, all partial derivatives)."""
    g = p
    for i in range(p.nvars):
        d = p.derivative(i)
        if d:
            g = poly_gcd(g, d)
    return p.divexact(g).primitive() if g.total_degree() > 0 else p.primitive()


# ---------------------------------------------------------------------------
# Matrices


class QMatrix:
    """Dense rows x cols matrix of Fractions (immutable)."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence], cols: int | None = None):
        rows = [tuple(to_rational(x) for x in row) for row in entries]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != cols:
                raise DimensionMismatch("ragged matrix")
        self.rows = len(rows)
        self.cols = cols
        self.entries = tuple(rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, QMatrix) and (self.rows, self.cols, self.entries) == (
            other.rows,
            other.cols,
            other.entries,
        )

    def transpose(self) -> "QMatrix":
        return QMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.rows)

    def apply(self, vector: Sequence) -> list:
        return [sum((a * b for a, b in zip(row, vector)), Fraction(0)) for row in self.entries]

    def __repr__(self) -> str:
        return f"QMatrix({self.rows}x{self.cols})"


def _as_rows(m) -> tuple[list, int]:
    if isinstance(m, QMatrix):
        return [list(r) for r in m.entries], m.cols
    rows = [[to_rational(x) for x in r] for r in m]
    return rows, (len(rows[0]) if rows else 0)


# threshold (rows*cols) above which exact kernels go through the certified modular route
MODULAR_THRESHOLD = 6000


def rref(m) -> tuple[list, list]:
    """Reduced row echelon form over Q with leftmost unit pivots: (nonzero rows, pivot columns)."""
    rows, ncols = _as_rows(m)
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        prow = [x * inv for x in rows[r]]
        rows[r] = prow
        nz = [j for j in range(c, ncols) if prow[j]]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    row = rows[i]
                    for j in nz:
                        row[j] -= f * prow[j]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def _kernel_from_rref(reduced: list, pivots: list, ncols: int) -> list:
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            if row[f]:
                v[p] = -row[f]
        basis.append(v)
    return basis


def kernel_basis(m, method: str = "auto") -> list:
    """Right null space basis in canonical reduced form.

    One vector per non-pivot column f of the reduced echelon form: it has a 1
    at f, zeros at the other non-pivot columns, and minus the reduced column
    entries at the pivot positions. Vectors are ordered by f.
    """
    rows, ncols = _as_rows(m)
    if ncols == 0:
        return []
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    if method == "auto":
        method = "modular" if len(rows) * ncols > MODULAR_THRESHOLD else "exact"
    if method == "modular":
        from toricimplicit import modular

        return modular.kernel_basis_modular(rows, ncols)
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")
    reduced, pivots = rref(rows)
    return _kernel_from_rref(reduced, pivots, ncols)


def rank(m, method: str = "auto") -> int:
    rows, ncols = _as_rows(m)
    if not rows or ncols == 0:
        return 0
    if method == "auto":
        method = "modular" if len(rows) * ncols > MODULAR_THRESHOLD else "exact"
    if method == "modular":
        from toricimplicit import modular

        return modular.exact_rank(rows, ncols)
    return len(rref(rows)[1])


def mat_vec(m, v: Sequence) -> list:
    rows, _ = _as_rows(m)
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in rows]


def det_rational(m) -> Fraction:
    """Determinant of a square rational matrix (fraction-free over the integers)."""
    rows, ncols = _as_rows(m)
    n = len(rows)
    if n != ncols:
        raise NonSquareError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    ints = []
    for row in rows:
        den = 1
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
        scale /= den
        ints.append([int(x * den) for x in row])
    return scale * det_integer(ints)


def det_integer(a: list) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    a = [list(r) for r in a]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k]), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (akk * rowi[j] - aik * rowk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1] if n else 1


# ---------------------------------------------------------------------------
# Polynomial matrices


def bareiss_det(m: Sequence[Sequence[SparsePoly]]) -> SparsePoly:
    """Determinant of a square matrix of polynomials by Bareiss elimination."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise NonSquareError("determinant of a non-square matrix")
    if n == 0:
        raise NonSquareError("empty matrix")
    nvars = next((p.nvars for row in m for p in row), 0)
    # clear denominators row by row so the elimination runs over Z[x]
    scale = Fraction(1)
    a = []
    for row in m:
        den = 1
        for p in row:
            for c in p.terms.values():
                den = den * c.denominator // math.gcd(den, c.denominator)
        scale /= den
        a.append([{e: int(c * den) for e, c in p.terms.items()} for p in row])
    sign = 1
    prev: dict = {(0,) * nvars: 1}
    for k in range(n - 1):
        if not a[k][k]:
            piv = next((i for i in range(k + 1, n) if a[i][k]), None)
            if piv is None:
                return SparsePoly.zero(nvars)
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                t = _ip_mul(akk, rowi[j])
                if aik and rowk[j]:
                    t = _ip_add(t, _ip_mul(aik, rowk[j]), -1)
                rowi[j] = _ip_divexact(t, prev) if t else {}
            rowi[k] = {}
        prev = akk
    det = a[n - 1][n - 1]
    return SparsePoly(nvars, det).scale(scale * sign)


def det_cofactor(m: Sequence[Sequence[SparsePoly]]) -> SparsePoly:
    """Laplace expansion along the first row; exponential, meant for tiny matrices."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise NonSquareError("determinant of a non-square matrix")
    if n == 1:
        return m[0][0]
    total = None
    for j in range(n):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * det_cofactor(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return SparsePoly.zero(m[0][0].nvars)
    return total


def evaluate_linear_grid(entries: Sequence[Sequence[Sequence]], point: Sequence) -> list:
    """Evaluate a grid of linear forms (coefficient vectors) at a point."""
    pt = [to_rational(x) for x in point]
    out = []
    for row in entries:
        vals = []
        for form in row:
            if len(form) != len(pt):
                raise DimensionMismatch("point length differs from the number of target variables")
            vals.append(sum((c * x for c, x in zip(form, pt) if c), Fraction(0)))
        out.append(vals)
    return out


def rank_at(m, point: Sequence) -> int:
    """Exact rank of a matrix of linear forms evaluated at a rational point.

    ``m`` is anything exposing ``entries`` (grid of coefficient vectors) and
    ``target_vars``.
    """
    if len(point) != len(m.target_vars):
        raise DimensionMismatch(f"point has {len(point)} coordinates, expected {len(m.target_vars)}")
    grid = evaluate_linear_grid(m.entries, point)
    if not grid or not grid[0]:
        return 0
    return rank(grid)
