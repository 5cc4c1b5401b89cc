"""Representation matrices, rank-drop membership, and implicit equations.

Two routes compute the gcd of maximal minors. The symbolic route runs
fraction-free elimination on polynomial entries followed by a multivariate
gcd; it is used for small minors and as an oracle in tests. The modular
route restricts every minor to lines through a fixed direction, gets
univariate determinants by evaluation and interpolation mod p, takes the gcd
of those, rebuilds the gcd polynomial by interpolating over a grid of lines,
and lifts it to Q by Chinese remaindering and rational reconstruction. Each
candidate is checked on fresh lines modulo an unused prime, and the final
equation is checked on parametrization samples over Q.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb, lcm
from typing import Sequence

import numpy as np

from toricimplicit import modular
from toricimplicit.arith import (
    DimensionMismatch,
    SparsePoly,
    bareiss_det,
    divide,
    grlex_key,
    kernel_basis,
    poly_gcd,
    rank_at,
)
from toricimplicit.modular import (
    _CRT,
    kernels,
    matmul_mod,
    poly_gcd_mod,
    poly_trim,
    primes,
    vandermonde_inverse,
)
from toricimplicit.polytope import NotSurfaceCase, normalized_area
from toricimplicit.semigroup import RingElement, ToricRing
from toricimplicit.syzygies import koszul_columns, syzygies_in_degree


class Setting(str, Enum):
    PROJECTIVE = "projective"
    MULTIPROJ = "multiproj"
    MULTIGRADED = "multigraded"


class DegreeTooLow(ValueError):
    pass


class EmptyMatrix(ValueError):
    pass


class RankDeficient(ArithmeticError):
    pass


class BasePointDetected(ValueError):
    pass


class RankDeficientB(ValueError):
    pass


class VerificationFailed(ArithmeticError):
    def __init__(self, message: str, result: "ImplicitResult | None" = None):
        super().__init__(message)
        self.result = result


def _mod_coeff(c: Fraction, p: int) -> int:
    return c.numerator % p * pow(c.denominator % p, -1, p) % p


# ---------------------------------------------------------------------------
# parametrizations


@dataclass
class Parametrization:
    """Sections defining the map, listed in target-variable order.

    For the (P^1)^n codomain the list is f_1, g_1, ..., f_n, g_n, so that the
    image of a point is (X_i : Y_i) = (f_i : g_i).
    """

    ring: ToricRing
    components: list
    setting: Setting

    @property
    def nsource(self) -> int:
        return self.ring.nvars_source

    @property
    def blocks(self) -> list:
        k = len(self.components)
        if self.setting is Setting.MULTIPROJ:
            return [[2 * i, 2 * i + 1] for i in range(k // 2)]
        return [list(range(k))]

    def _is_base(self, vals: Sequence) -> bool:
        return any(not any(vals[i] for i in blk) for blk in self.blocks)

    def random_point(self, rng: random.Random, bound: int = 9) -> tuple:
        return tuple(
            Fraction(rng.choice((-1, 1)) * rng.randint(1, bound), rng.randint(1, 4)) for _ in range(self.nsource)
        )

    def image(self, point: Sequence) -> tuple | None:
        vals = tuple(c.evaluate(point) for c in self.components)
        return None if self._is_base(vals) else vals

    def samples(self, count: int, rng: random.Random) -> list:
        """(source point, image) pairs avoiding the base locus."""
        out = []
        tries = 0
        while len(out) < count:
            tries += 1
            if tries > 50 * count + 100:
                raise RuntimeError("could not find enough points outside the base locus")
            pt = self.random_point(rng)
            img = self.image(pt)
            if img is not None:
                out.append((pt, img))
        return out

    def images_mod(self, count: int, p: int, rng: random.Random) -> np.ndarray:
        comps = [
            [(pt, _mod_coeff(c, p)) for pt, c in comp.coeffs.items()] for comp in self.components
        ]
        rows = []
        while len(rows) < count:
            x = [rng.randrange(1, p) for _ in range(self.nsource)]
            vals = []
            for comp in comps:
                s = 0
                for pt, c in comp:
                    term = c
                    for xi, e in zip(x, pt):
                        if e:
                            term = term * pow(xi, e, p) % p
                    s += term
                vals.append(s % p)
            if not self._is_base(vals):
                rows.append(vals)
        return np.array(rows, dtype=np.int64)

    def source_polys(self) -> list:
        """Components as polynomials in the ring's own source coordinates."""
        return [SparsePoly(self.nsource, comp.coeffs) for comp in self.components]


# ---------------------------------------------------------------------------
# representation matrices


@dataclass
class RepMatrix:
    setting: Setting
    nu: object
    row_labels: list
    col_labels: list
    entries: list  # rows x cols grid of coefficient tuples, one coefficient per target variable
    target_vars: list
    param: Parametrization | None = field(default=None, repr=False, compare=False)
    generic_rank: int | None = None

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def shape(self) -> tuple:
        return self.rows, self.cols

    def linear_form(self, r: int, c: int) -> SparsePoly:
        return SparsePoly.linear_form(self.entries[r][c])

    def integer_layers(self) -> list:
        """One integer matrix per target variable; columns scaled to clear denominators."""
        nv = len(self.target_vars)
        scale = []
        for c in range(self.cols):
            den = 1
            for r in range(self.rows):
                for x in self.entries[r][c]:
                    if x:
                        den = lcm(den, x.denominator)
            scale.append(den)
        return [
            [[int(self.entries[r][c][k] * scale[c]) for c in range(self.cols)] for r in range(self.rows)]
            for k in range(nv)
        ]

    def at_mod(self, point: Sequence[int], p: int) -> np.ndarray:
        layers = self.integer_layers()
        out = np.zeros((self.rows, self.cols), dtype=np.int64)
        for x, layer in zip(point, layers):
            out = (out + (np.array(layer, dtype=object) % p).astype(np.int64) * (x % p) % p) % p
        return out

    def to_dict(self) -> dict:
        return {
            "setting": self.setting.value,
            "nu": list(self.nu) if isinstance(self.nu, tuple) else self.nu,
            "rows": self.rows,
            "cols": self.cols,
            "row_labels": [list(x) if isinstance(x, tuple) else x for x in self.row_labels],
            "col_labels": [_label_json(x) for x in self.col_labels],
            "target_vars": list(self.target_vars),
            "entries": [[[str(x) for x in form] for form in row] for row in self.entries],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RepMatrix":
        nu = data["nu"]
        return cls(
            setting=Setting(data["setting"]),
            nu=tuple(nu) if isinstance(nu, list) else nu,
            row_labels=[tuple(x) if isinstance(x, list) else x for x in data["row_labels"]],
            col_labels=list(data["col_labels"]),
            entries=[[tuple(Fraction(x) for x in form) for form in row] for row in data["entries"]],
            target_vars=list(data["target_vars"]),
        )


def _label_json(label):
    if isinstance(label, tuple):
        return [_label_json(x) for x in label]
    return label


def target_names(setting: Setting, n: int) -> list:
    """n is the number of sections (projective) or of pairs (multiprojective)."""
    if setting is Setting.MULTIPROJ:
        return [name for i in range(1, n + 1) for name in (f"X{i}", f"Y{i}")]
    return [f"X{i}" for i in range(n)]


def _default_setting(ring: ToricRing, data) -> Setting:
    if data and isinstance(data[0], tuple):
        return Setting.MULTIPROJ
    return Setting.MULTIGRADED if ring.multigraded else Setting.PROJECTIVE


def _below(bound, nu) -> bool:
    if bound is None:
        return False
    if hasattr(bound, "valid"):
        return not bound.valid(nu)
    if isinstance(nu, tuple):
        return any(a < b for a, b in zip(nu, bound))
    return nu < bound


def build_matrix(ring: ToricRing, data, nu, setting: Setting | None = None, bound=None, force: bool = False,
                 seed: int = 0) -> RepMatrix:
    """The matrix M_nu for the chosen setting.

    ``bound`` is the degree bound from the regularity module (an integer, a
    degree vector, or a region result); a lower nu raises DegreeTooLow
    unless ``force`` is set.
    """
    setting = Setting(setting) if setting is not None else _default_setting(ring, data)
    nu = ring.norm_degree(nu)
    if not force and (_below(bound, nu) or nu == ring.zero_degree):
        raise DegreeTooLow(f"nu={nu} is below the degree bound {getattr(bound, 'describe', lambda: bound)()}")
    rows_basis = ring.basis(nu)
    if setting is Setting.MULTIPROJ:
        pairs = list(data)
        cols = koszul_columns(ring, pairs, nu)
        nv = 2 * len(pairs)
        entries = [[(Fraction(0),) * nv for _ in cols] for _ in rows_basis]
        for j, col in enumerate(cols):
            for r, forms in col.entries.items():
                vec = [Fraction(0)] * nv
                for k, c in forms.items():
                    vec[k] = Fraction(c)
                entries[r][j] = tuple(vec)
        col_labels = [col.label for col in cols]
        comps = [x for pair in pairs for x in pair]
        names = target_names(setting, len(pairs))
    else:
        h = list(data)
        syz = syzygies_in_degree(ring, h, nu)
        size = len(rows_basis)
        entries = [
            [tuple(v[i * size + m] for i in range(len(h))) for v in syz.vectors] for m in range(size)
        ]
        col_labels = [f"s{j}" for j in range(len(syz.vectors))]
        comps = h
        names = target_names(setting, len(h))
    if not rows_basis or not col_labels:
        raise EmptyMatrix(f"M_nu is empty at nu={nu} ({len(rows_basis)} x {len(col_labels)})")
    m = RepMatrix(setting, nu, list(rows_basis), col_labels, entries, names, Parametrization(ring, comps, setting))
    m.generic_rank = generic_rank(m, seed)
    return m


def generic_rank(m: RepMatrix, seed: int = 0, tries: int = 2) -> int:
    """Rank at random points modulo a large prime (a lower bound for the generic rank, exact w.h.p.)."""
    rng = random.Random(seed)
    p = next(primes())
    best = 0
    layers = [(np.array(layer, dtype=object) % p).astype(np.int64) for layer in m.integer_layers()]
    for _ in range(tries):
        a = np.zeros((m.rows, m.cols), dtype=np.int64)
        for layer in layers:
            a = (a + layer * rng.randrange(1, p) % p) % p
        best = max(best, int(kernels.rank_mod(np.ascontiguousarray(a), p)))
        if best == m.rows:
            break
    return best


def is_on_hypersurface(m: RepMatrix, point: Sequence) -> bool:
    """Exact rank drop test at a rational point of the target space."""
    if len(point) != len(m.target_vars):
        raise DimensionMismatch(f"expected {len(m.target_vars)} coordinates")
    return rank_at(m, point) < m.rows


# ---------------------------------------------------------------------------
# minor selection


def select_columns(m: RepMatrix, count: int = 1, seed: int = 0) -> list:
    """Up to `count` distinct sets of independent columns; the first is the leftmost greedy choice."""
    rng = random.Random(seed)
    p = next(primes())
    layers = [(np.array(layer, dtype=object) % p).astype(np.int64) for layer in m.integer_layers()]
    a = None
    for _ in range(3):
        a = np.zeros((m.rows, m.cols), dtype=np.int64)
        for layer in layers:
            a = (a + layer * rng.randrange(1, p) % p) % p
        piv = list(kernels.rref_mod(np.ascontiguousarray(a.copy()), p))
        if len(piv) == m.rows:
            break
    else:
        raise RankDeficient(f"no {m.rows} x {m.rows} minor is generically nonzero")
    selections = [piv]
    attempts = 0
    while len(selections) < count and attempts < 6 * count:
        attempts += 1
        perm = list(range(m.cols))
        rng.shuffle(perm)
        piv = kernels.rref_mod(np.ascontiguousarray(a[:, perm]), p)
        sel = sorted(perm[i] for i in piv)
        if sel not in selections:
            selections.append(sel)
    return selections


@dataclass(frozen=True)
class MinorSpec:
    """A square r x r matrix built from M: chosen columns, or M times an integer mixing matrix."""

    columns: tuple | None = None
    mix: tuple | None = None

    def label(self) -> str:
        return f"cols{list(self.columns)}" if self.columns is not None else f"mix{len(self.mix)}x{len(self.mix[0])}"

    def apply(self, layers: list) -> list:
        out = []
        for layer in layers:
            if self.columns is not None:
                out.append([[row[c] for c in self.columns] for row in layer])
            else:
                prod = np.array(layer, dtype=object).dot(np.array(self.mix, dtype=object))
                out.append([[int(x) for x in row] for row in prod])
        return out


def minor_specs(m: RepMatrix, count: int, seed: int = 0) -> list:
    """The greedy leftmost minor, then random column mixtures.

    By Cauchy-Binet det(M R) is a combination of all maximal minors with
    random weights, so a few of them reach the gcd of every maximal minor.
    """
    first = select_columns(m, 1, seed)[0]
    specs = [MinorSpec(columns=tuple(first))]
    rng = random.Random(seed + 7)
    for _ in range(count - 1):
        mix = tuple(tuple(rng.randint(-9, 9) for _ in range(m.rows)) for _ in range(m.cols))
        specs.append(MinorSpec(mix=mix))
    return specs


# ---------------------------------------------------------------------------
# gcd of minors: symbolic route


def minor_gcd_symbolic(m: RepMatrix, specs: Sequence[MinorSpec]) -> SparsePoly:
    layers = m.integer_layers()
    nv = len(layers)
    g = None
    for spec in specs:
        square = spec.apply(layers)
        sub = [
            [SparsePoly.linear_form([square[k][r][c] for k in range(nv)]) for c in range(m.rows)]
            for r in range(m.rows)
        ]
        det = bareiss_det(sub)
        g = det if g is None else poly_gcd(g, det)
    return g.primitive()


# ---------------------------------------------------------------------------
# gcd of minors: modular route


def _eval_int_poly_mod(terms: dict, point: Sequence[int], p: int) -> int:
    total = 0
    for e, c in terms.items():
        term = c % p
        for x, k in zip(point, e):
            if k:
                term = term * pow(x, k, p) % p
        total += term
    return total % p


def _monomials(nvars: int, degree: int) -> list:
    from toricimplicit.semigroup import _compositions

    return sorted(_compositions(degree, nvars), key=grlex_key, reverse=True)


class _LineGcd:
    """Gcd of the selected minors restricted to lines, modulo one prime."""

    def __init__(self, squares: list, p: int):
        self.p = p
        self.nv = len(squares[0])
        self.r = len(squares[0][0])
        self.stacks = [
            [np.ascontiguousarray((np.array(layer, dtype=object) % p).astype(np.int64)) for layer in sq]
            for sq in squares
        ]
        nodes = list(range(1, self.r + 2))
        self.lams = np.array(nodes, dtype=np.int64)
        self.vinv = vandermonde_inverse(nodes, p)

    def restricted(self, direction: Sequence[int], offset: Sequence[int]) -> list:
        """Monic gcd over all minors of D_j(lam*direction + offset), as coefficients low -> high."""
        p = self.p
        g = None
        for stack in self.stacks:
            A = np.zeros((self.r, self.r), dtype=np.int64)
            B = np.zeros((self.r, self.r), dtype=np.int64)
            for k in range(self.nv):
                if offset[k]:
                    A = (A + stack[k] * (offset[k] % p) % p) % p
                if direction[k]:
                    B = (B + stack[k] * (direction[k] % p) % p) % p
            dets = kernels.pencil_dets_mod(np.ascontiguousarray(A), np.ascontiguousarray(B), self.lams, p)
            coeffs = matmul_mod(self.vinv, np.asarray(dets, dtype=np.int64)[:, None], p).ravel().tolist()
            poly_trim(coeffs)
            g = coeffs if g is None else poly_gcd_mod(g, coeffs, p)
            if len(g) == 1:
                break
        if not g:
            return g
        inv = pow(g[-1], -1, p)
        return [c * inv % p for c in g]


class _Unlucky(Exception):
    pass


class _DegreeDrop(Exception):
    def __init__(self, degree: int):
        self.degree = degree


def _shift_var(poly: dict, i: int, c: int, p: int, binom: list) -> dict:
    """Substitute x_i -> x_i + c*x_0 in a dict polynomial mod p."""
    out: dict = {}
    cpow = [1]
    for _ in range(len(binom)):
        cpow.append(cpow[-1] * c % p)
    for e, coef in poly.items():
        b = e[i]
        if b == 0:
            out[e] = (out.get(e, 0) + coef) % p
            continue
        for t in range(b + 1):
            f = list(e)
            f[i] = t
            f[0] += b - t
            f = tuple(f)
            out[f] = (out.get(f, 0) + coef * binom[b][t] % p * cpow[b - t]) % p
    return {e: v for e, v in out.items() if v}


def _binomials(n: int, p: int) -> list:
    rows = [[1]]
    for k in range(1, n + 1):
        prev = rows[-1]
        rows.append([1] + [(prev[j - 1] + prev[j]) % p for j in range(1, k)] + [1])
    return rows


class _Chart:
    """Affine chart of the target: the last variable of every block is set to 1."""

    def __init__(self, blocks: list, nv: int):
        self.blocks = blocks
        self.nv = nv
        self.affine = [i for blk in blocks for i in blk[:-1]]

    def line(self, w: Sequence[int], y: Sequence[int]) -> tuple:
        """Direction and offset of lam -> lam*(1, w) + (0, y) in affine coordinates."""
        d = [0] * self.nv
        o = [0] * self.nv
        for blk in self.blocks:
            o[blk[-1]] = 1
        a = self.affine
        d[a[0]] = 1
        for j in range(1, len(a)):
            d[a[j]] = w[j - 1]
            o[a[j]] = y[j - 1]
        return d, o


def _target_blocks(m: RepMatrix) -> list:
    nv = len(m.target_vars)
    if m.setting is Setting.MULTIPROJ:
        return [[2 * i, 2 * i + 1] for i in range(nv // 2)]
    return [list(range(nv))]


def _chart_degree(lg: _LineGcd, chart: _Chart, rng: random.Random, lines: int = 3) -> int:
    p = lg.p
    k = len(chart.affine)
    best = None
    for _ in range(lines):
        d, o = chart.line([rng.randrange(1, p) for _ in range(k - 1)], [rng.randrange(1, p) for _ in range(k - 1)])
        deg = len(lg.restricted(d, o)) - 1
        best = deg if best is None else min(best, deg)
    return best


def _block_degrees(lg: _LineGcd, blocks: list, rng: random.Random, lines: int = 3) -> list:
    """Degree of the gcd in each block, from lines moving inside one block only."""
    p = lg.p
    out = []
    for blk in blocks:
        best = None
        for _ in range(lines):
            d = [0] * lg.nv
            for i in blk:
                d[i] = rng.randrange(1, p)
            o = [rng.randrange(1, p) for _ in range(lg.nv)]
            deg = len(lg.restricted(d, o)) - 1
            best = deg if best is None else min(best, deg)
        out.append(best)
    return out


def _gcd_image(lg: _LineGcd, chart: _Chart, w: Sequence[int], g: int, deltas: Sequence[int],
               rng: random.Random) -> dict:
    """G / lc(G) mod p, where lc is the coefficient of the grlex-largest monomial.

    The dehomogenized gcd has total degree g in the chart; its restriction to
    each line of a grid is monic in lam, and the coefficients are
    interpolated over the grid offsets, then the shear y_j = z_j - w_j z_0 is
    undone and every block is rehomogenized to its degree.
    """
    p = lg.p
    k = len(chart.affine)
    grid_dims = k - 1
    nodes = rng.sample(range(1, p), g + 1)
    coeff = np.zeros((g,) + (g + 1,) * grid_dims, dtype=np.int64)
    for idx in itertools.product(range(g + 1), repeat=grid_dims):
        h = lg.restricted(*chart.line(w, [nodes[i] for i in idx]))
        deg = len(h) - 1
        if deg < g:
            raise _DegreeDrop(deg)
        if deg > g:
            raise _Unlucky()
        for kk in range(g):
            coeff[(kk,) + idx] = h[kk]
    if grid_dims:
        vinv = vandermonde_inverse(nodes, p)
        for ax in range(1, grid_dims + 1):
            moved = np.moveaxis(coeff, ax, 0)
            shape = moved.shape
            flat = matmul_mod(vinv, moved.reshape(shape[0], -1), p)
            coeff = np.moveaxis(flat.reshape(shape), 0, ax)
    # polynomial in (lam, y_1, ..., y_{k-1}) of total degree g
    poly: dict = {(g,) + (0,) * grid_dims: 1}
    for pos in zip(*np.nonzero(coeff)):
        kk, a = int(pos[0]), tuple(int(x) for x in pos[1:])
        if kk + sum(a) > g:
            raise _Unlucky()
        poly[(kk,) + a] = int(coeff[pos])
    binom = _binomials(g, p)
    for j in range(1, k):
        poly = _shift_var(poly, j, (-w[j - 1]) % p, p, binom)
    full: dict = {}
    for e, c in poly.items():
        x = [0] * lg.nv
        for i, ei in zip(chart.affine, e):
            x[i] = ei
        for blk, delta in zip(chart.blocks, deltas):
            rest = delta - sum(x[i] for i in blk[:-1])
            if rest < 0:
                raise _Unlucky()
            x[blk[-1]] = rest
        full[tuple(x)] = c
    lead = max(full, key=grlex_key)
    inv = pow(full[lead], -1, p)
    return {e: v * inv % p for e, v in full.items()}


def _gcd_degree(lg: _LineGcd, rng: random.Random, lines: int = 3) -> int:
    p = lg.p
    best = None
    for _ in range(lines):
        direction = [rng.randrange(1, p) for _ in range(lg.nv)]
        offset = [rng.randrange(0, p) for _ in range(lg.nv)]
        deg = len(lg.restricted(direction, offset)) - 1
        best = deg if best is None else min(best, deg)
    return best


def _agrees_on_lines(G: SparsePoly, lg: _LineGcd, rng: random.Random, lines: int = 2) -> bool:
    p = lg.p
    terms = G.integer_terms()
    g = G.total_degree()
    for _ in range(lines):
        direction = [rng.randrange(1, p) for _ in range(lg.nv)]
        offset = [rng.randrange(1, p) for _ in range(lg.nv)]
        h = lg.restricted(direction, offset)
        if len(h) - 1 != g:
            return False
        xs = list(range(1, g + 2))
        vals = [_eval_int_poly_mod(terms, [(x * d + o) % p for d, o in zip(direction, offset)], p) for x in xs]
        coeffs = matmul_mod(vandermonde_inverse(xs, p), np.array(vals, dtype=np.int64)[:, None], p).ravel().tolist()
        poly_trim(coeffs)
        if not coeffs:
            return False
        inv = pow(coeffs[-1], -1, p)
        if [c * inv % p for c in coeffs] != h:
            return False
    return True


@dataclass
class ModularStats:
    primes_used: int = 0
    unlucky: int = 0
    lines_per_prime: int = 0
    degree: int = -1


def minor_gcd_modular(m: RepMatrix, specs: Sequence[MinorSpec], seed: int = 0,
                      max_primes: int = 80, stats: ModularStats | None = None) -> SparsePoly:
    """gcd of the given square matrices' determinants via line restrictions mod p and rational lifting."""
    rng = random.Random(seed)
    stats = stats if stats is not None else ModularStats()
    layers = m.integer_layers()
    nv = len(layers)
    squares = [spec.apply(layers) for spec in specs]
    blocks = _target_blocks(m)
    chart = _Chart(blocks, nv)
    stream = primes()
    w = [rng.randint(1, 9) for _ in range(len(chart.affine) - 1)]
    first = _LineGcd(squares, next(stream))
    if _gcd_degree(first, rng) <= 0:
        return SparsePoly.one(nv)
    g = _chart_degree(first, chart, rng)
    deltas = _block_degrees(first, blocks, rng)
    crt = None
    lead = None
    previous = None
    monos = _block_monomials(nv, blocks, tuple(deltas))
    for _ in range(max_primes):
        p = next(stream)
        lg = _LineGcd(squares, p)
        try:
            image = _gcd_image(lg, chart, w, g, deltas, rng)
        except _Unlucky:
            stats.unlucky += 1
            continue
        except _DegreeDrop:
            # the first prime overestimated a degree: start over with this one
            g = _chart_degree(lg, chart, rng)
            deltas = _block_degrees(lg, blocks, rng)
            monos = _block_monomials(nv, blocks, tuple(deltas))
            crt, lead, previous = None, None, None
            continue
        stats.primes_used += 1
        this_lead = max(image, key=grlex_key)
        if lead is None or grlex_key(this_lead) > grlex_key(lead):
            lead, crt, previous = this_lead, _CRT(), None
        elif this_lead != lead:
            stats.unlucky += 1
            continue
        crt.add(np.array([image.get(e, 0) for e in monos], dtype=np.int64), p)
        if crt.modulus.bit_length() < 60:
            continue
        values = crt.reconstruct()
        if values is None:
            continue
        if values != previous:
            previous = values
            continue
        G = SparsePoly(nv, {e: v for e, v in zip(monos, values) if v}).primitive()
        check = _LineGcd(squares, next(stream))
        if _agrees_on_lines(G, check, rng):
            stats.degree = G.total_degree()
            stats.lines_per_prime = (g + 1) ** (len(chart.affine) - 1)
            return G
        previous = None
    raise ArithmeticError("modular gcd did not stabilise within the prime budget")


def gcd_degree_on_lines(m: RepMatrix, count: int = 2, seed: int = 0, lines: int = 3) -> int:
    """Degree of the gcd of maximal minors, read off random lines modulo a large prime."""
    layers = m.integer_layers()
    lg = _LineGcd([spec.apply(layers) for spec in minor_specs(m, count, seed)], next(primes()))
    return _gcd_degree(lg, random.Random(seed), lines)


# ---------------------------------------------------------------------------
# factors, verification, results


@dataclass(frozen=True)
class Factor:
    poly: SparsePoly
    status: str  # implicit-equation-power | extraneous | unverified
    multiplicity: int = 1


@dataclass
class ImplicitResult:
    candidate: SparsePoly
    degree: int
    verified: bool
    factors: list
    deg_formula: tuple | None = None
    route: str = ""
    selections: list = field(default_factory=list)
    samples_checked: int = 0
    identity_certified: bool | None = None
    notes: list = field(default_factory=list)

    @property
    def equation(self) -> SparsePoly | None:
        for f in self.factors:
            if f.status == "implicit-equation-power":
                return f.poly
        return None


def _block_monomials(nvars: int, blocks: list, kappa: tuple) -> list:
    from toricimplicit.semigroup import _compositions

    parts = [list(_compositions(k, len(blk))) for k, blk in zip(kappa, blocks)]
    out = []
    for combo in itertools.product(*parts):
        e = [0] * nvars
        for blk, sub in zip(blocks, combo):
            for i, x in zip(blk, sub):
                e[i] = x
        out.append(tuple(e))
    return sorted(out, key=grlex_key, reverse=True)


def _monomial_values_mod(points: np.ndarray, monos: list, p: int) -> np.ndarray:
    top = max((max(e) for e in monos), default=0)
    npts, nv = points.shape
    pw = np.ones((nv, top + 1, npts), dtype=np.int64)
    for i in range(nv):
        for k in range(1, top + 1):
            pw[i, k] = pw[i, k - 1] * points[:, i] % p
    out = np.ones((npts, len(monos)), dtype=np.int64)
    for j, e in enumerate(monos):
        col = np.ones(npts, dtype=np.int64)
        for i, k in enumerate(e):
            if k:
                col = col * pw[i, k] % p
        out[:, j] = col
    return out


def _kernel_line_mod(vals: np.ndarray, p: int) -> np.ndarray | None:
    """The kernel vector of a corank-one matrix mod p, or None if the corank differs."""
    work = np.ascontiguousarray(vals.copy())
    piv = list(kernels.rref_mod(work, p))
    k = vals.shape[1]
    if len(piv) != k - 1:
        return None
    free = next(j for j in range(k) if j not in set(piv))
    vec = np.zeros(k, dtype=np.int64)
    vec[free] = 1
    for i, c in enumerate(piv):
        vec[c] = (-work[i, free]) % p
    return vec


def lowest_vanishing_polynomial(param: Parametrization, max_degrees: Sequence[int], seed: int = 0,
                                cap: int = 3000, max_primes: int = 200) -> SparsePoly | None:
    """Least-degree polynomial vanishing on the image, searched block degree by block degree.

    The first multidegree whose monomials become dependent on image points
    is found modulo a prime; its coefficients are lifted from kernel vectors
    modulo several primes. Returns None when the search exceeds `cap`
    monomials or the kernel is not one-dimensional.
    """
    rng = random.Random(seed)
    blocks = param.blocks
    nv = len(param.components)
    stream = primes()
    p = next(stream)
    kappas = sorted(
        (k for k in itertools.product(*[range(d + 1) for d in max_degrees]) if any(k)),
        key=lambda k: (sum(k), k),
    )
    pool = np.zeros((0, nv), dtype=np.int64)
    for kappa in kappas:
        monos = _block_monomials(nv, blocks, kappa)
        if len(monos) > cap:
            return None
        need = len(monos) + 8
        if pool.shape[0] < need:
            pool = np.vstack([pool, param.images_mod(need - pool.shape[0], p, rng)])
        vals = _monomial_values_mod(pool[:need], monos, p)
        if int(kernels.rank_mod(np.ascontiguousarray(vals), p)) < len(monos):
            break
    else:
        return None
    crt, previous = None, None
    lead = None
    for _ in range(max_primes):
        q = next(stream)
        vec = _kernel_line_mod(_monomial_values_mod(param.images_mod(need, q, rng), monos, q), q)
        if vec is None:
            continue
        nz = np.nonzero(vec)[0]
        this_lead = int(nz[0])  # monos are sorted grlex-descending
        if lead is None or this_lead < lead:
            lead, crt, previous = this_lead, _CRT(), None
        elif this_lead != lead:
            continue
        vec = vec * pow(int(vec[lead]), -1, q) % q
        crt.add(vec, q)
        values = crt.reconstruct()
        if values is None:
            continue
        if values == previous:
            return SparsePoly(nv, {e: c for e, c in zip(monos, values) if c}).primitive()
        previous = values
    return None


def _monomial_value(point: Sequence[Fraction], e: Sequence[int]) -> Fraction:
    v = Fraction(1)
    for x, k in zip(point, e):
        if k:
            v *= x ** k
    return v


def split_factors(G: SparsePoly, param: Parametrization, images: list, seed: int = 0, cap: int = 3000) -> list:
    """Write G = F^e * R with F the implicit equation; tag R as extraneous."""
    max_deg = G.block_degrees(param.blocks)
    F = lowest_vanishing_polynomial(param, max_deg, seed, cap)
    if F is not None and any(F.evaluate(img) != 0 for img in images):
        F = None
    if F is None:
        return [Factor(G, "unverified", 1)]
    e = 0
    rest = G
    while True:
        q, r = divide(rest, F)
        if r:
            break
        rest, e = q, e + 1
    if e == 0:
        return [Factor(G, "unverified", 1)]
    factors = [Factor(F, "implicit-equation-power", e)]
    if rest.total_degree() > 0:
        rest = rest.primitive()
        vanishes = all(rest.evaluate(img) == 0 for img in images)
        factors.append(Factor(rest, "unverified" if vanishes else "extraneous", 1))
    return factors


def substitution_identity(poly: SparsePoly, param: Parametrization, max_points: int = 20000) -> bool | None:
    """Exact test that poly(components) vanishes identically.

    The composite is a polynomial whose degree in each source variable is
    bounded; vanishing on a full tensor grid of that size proves it is zero.
    Returns None when the grid would be too large.
    """
    comps = param.source_polys()
    if param.setting is Setting.MULTIPROJ:
        blocks = param.blocks
        bounds = [0] * param.nsource
        for e in poly.terms:
            for j in range(param.nsource):
                total = 0
                for blk in blocks:
                    k = sum(e[i] for i in blk)
                    total += k * max(comps[i].degree(j) for i in blk)
                bounds[j] = max(bounds[j], total)
    else:
        g = poly.total_degree()
        bounds = [g * max(c.degree(j) for c in comps) for j in range(param.nsource)]
    fixed = set()
    if param.ring.multigraded:
        # the composite is multihomogeneous, so setting one variable per block to 1 loses nothing
        start = 0
        for r in param.ring.ranks:
            fixed.add(start + r)
            start += r + 1
    size = 1
    for j, b in enumerate(bounds):
        if j not in fixed:
            size *= b + 1
    if size > max_points:
        return None
    axes = [range(1, 2) if j in fixed else range(1, b + 2) for j, b in enumerate(bounds)]
    for pt in itertools.product(*axes):
        vals = [c.evaluate(pt) for c in comps]
        if poly.evaluate(vals) != 0:
            return False
    return True


def implicit_equation(m: RepMatrix, strategy: str = "multi-minor-gcd", samples: int = 20, seed: int = 0,
                      route: str = "auto", max_minors: int = 4, symbolic_limit: int = 8,
                      split: bool = True) -> ImplicitResult:
    """gcd of maximal minors, verified on parametrization samples, split into F^e times the rest."""
    if m.rows > m.cols:
        raise RankDeficient(f"matrix has more rows than columns ({m.rows} x {m.cols})")
    count = 1 if strategy == "single-minor" or m.rows == m.cols else max_minors
    if strategy not in ("single-minor", "multi-minor-gcd"):
        raise ValueError(f"unknown strategy {strategy!r}")
    specs = minor_specs(m, count, seed)
    if route == "auto":
        route = "symbolic" if m.rows <= symbolic_limit else "modular"
    stats = ModularStats()
    if route == "symbolic":
        G = minor_gcd_symbolic(m, specs)
    elif route == "modular":
        G = minor_gcd_modular(m, specs, seed, stats=stats)
    else:
        raise ValueError(f"unknown route {route!r}")
    notes = []
    if stats.primes_used:
        notes.append(f"modular gcd: {stats.primes_used} primes, {stats.lines_per_prime} lines per prime")
    result = ImplicitResult(G, G.total_degree(), False, [Factor(G, "unverified", 1)], route=route,
                            selections=[spec.label() for spec in specs], notes=notes)
    if m.param is None:
        result.notes.append("no parametrization attached; nothing verified")
        return result
    rng = random.Random(seed + 1)
    pairs = m.param.samples(samples, rng)
    images = [img for _, img in pairs]
    result.samples_checked = len(images)
    if G.total_degree() <= 0 or any(G.evaluate(img) != 0 for img in images):
        raise VerificationFailed("the gcd of the minors does not vanish on the parametrization", result)
    result.verified = True
    if split:
        result.factors = split_factors(G, m.param, images, seed)
    eq = result.equation
    if eq is not None:
        result.identity_certified = substitution_identity(eq, m.param)
    try:
        result.deg_formula = degree_report(m.param.ring, m.param.components)
    except NotSurfaceCase:
        pass
    return result


# ---------------------------------------------------------------------------
# cheap representation checks for matrices too large for a full equation


@dataclass
class RepresentationCheck:
    nu: object
    shape: tuple
    generic_rank: int
    euler: int
    expected_degree: int
    gcd_degree: int
    on_points: int
    off_points: int
    dropped_on: int
    full_off: int

    @property
    def ok(self) -> bool:
        return (
            self.generic_rank == self.shape[0]
            and self.euler == 0
            and self.expected_degree == self.gcd_degree
            and self.dropped_on == self.on_points
            and self.full_off == self.off_points
        )


def _rank_mod_at(m: RepMatrix, layers: list, point: Sequence[int], p: int) -> int:
    a = np.zeros((m.rows, m.cols), dtype=np.int64)
    for x, layer in zip(point, layers):
        a = (a + layer * (x % p) % p) % p
    return int(kernels.rank_mod(np.ascontiguousarray(a), p))


def representation_check(m: RepMatrix, diagnostics, seed: int = 0, points: int = 20) -> RepresentationCheck:
    """Test whether M_nu represents a hypersurface of the bookkept degree.

    Checks full generic rank, Euler characteristic 0 of the strand, that the
    gcd degree of maximal minors equals the determinant degree of the strand,
    rank drop at images of random parameters and full rank at random points,
    all modulo a large prime.
    """
    rng = random.Random(seed)
    p = next(primes())
    layers = [(np.array(layer, dtype=object) % p).astype(np.int64) for layer in m.integer_layers()]
    gen = m.generic_rank if m.generic_rank is not None else generic_rank(m, seed)
    gdeg = gcd_degree_on_lines(m, 2, seed) if gen == m.rows else -1
    on = m.param.images_mod(points, p, rng)
    dropped = sum(_rank_mod_at(m, layers, list(row), p) < m.rows for row in on)
    full = 0
    for _ in range(points):
        pt = [rng.randrange(1, p) for _ in m.target_vars]
        full += _rank_mod_at(m, layers, pt, p) == m.rows
    return RepresentationCheck(m.nu, m.shape, gen, diagnostics.euler, diagnostics.expected_det_degree,
                               gdeg, points, points, dropped, full)


# ---------------------------------------------------------------------------
# degree formula, curves, Gale duals


@dataclass(frozen=True)
class DegreeReport:
    area: int
    note: str

    def as_tuple(self) -> tuple:
        return self.area, self.note


def degree_report(ring: ToricRing, data=None) -> DegreeReport:
    """Normalized area of the embedding polytope: an upper bound for deg(phi) deg(S)."""
    note = "upper bound for deg(phi)*deg(S); equality when there are no base points"
    if ring.multigraded:
        if ring.ranks != (1, 1):
            raise NotSurfaceCase("degree formula needs a surface source")
        deg = None
        if data:
            first = data[0][0] if isinstance(data[0], tuple) else data[0]
            deg = first.degree
        if deg is None:
            raise ValueError("need the sections to read their bidegree")
        return DegreeReport(2 * deg[0] * deg[1], note)
    if ring.base.dim != 2:
        raise NotSurfaceCase("degree formula needs a surface source")
    return DegreeReport(ring.factor ** 2 * normalized_area(ring.base), note)


def moving_lines_curve(a: SparsePoly, b: SparsePoly, c: SparsePoly, seed: int = 0) -> ImplicitResult:
    """Implicit equation of a plane curve from the degree k-1 syzygies of (a, b, c)."""
    polys = [a, b, c]
    if polys[0].nvars == 1:
        k = max(p.total_degree() for p in polys)
        polys = [p.homogenize(k) for p in polys]
    if any(p.nvars != 2 for p in polys):
        raise ValueError("expected polynomials in one or two variables")
    degs = {p.total_degree() for p in polys if p}
    if len(degs) != 1 or not all(p.is_homogeneous() for p in polys):
        raise ValueError("a, b, c must be homogeneous of one degree")
    k = degs.pop()
    g = poly_gcd(poly_gcd(polys[0], polys[1]), polys[2])
    if g.total_degree() > 0:
        raise ValueError("a, b, c have a common factor")
    ring = ToricRing.cox((1,))
    h = [RingElement(ring, (k,), dict(p.terms)) for p in polys]
    syz = syzygies_in_degree(ring, h, (k - 1,))
    if len(syz) != k:
        raise BasePointDetected(f"expected {k} syzygies of degree {k - 1}, found {len(syz)}")
    m = build_matrix(ring, h, (k - 1,), Setting.MULTIGRADED, force=True, seed=seed)
    det = bareiss_det([[m.linear_form(r, col) for col in range(m.cols)] for r in range(m.rows)]).primitive()
    rng = random.Random(seed)
    images = [img for _, img in m.param.samples(20, rng)]
    verified = det.total_degree() > 0 and all(det.evaluate(img) == 0 for img in images)
    result = ImplicitResult(det, det.total_degree(), verified, [Factor(det, "unverified", 1)], route="symbolic",
                            selections=[list(range(k))], samples_checked=len(images))
    if verified:
        result.factors = split_factors(det, m.param, images, seed)
    return result


def gale_dual_map(B: Sequence[Sequence[int]]) -> list:
    """Pairs (f_j, g_j) from an integer matrix: l_i is row i read as a linear form."""
    rows = [list(map(int, r)) for r in B]
    if not rows:
        raise ValueError("empty matrix")
    ncols = len(rows[0])
    from toricimplicit.arith import rank

    if rank(rows) < ncols:
        raise RankDeficientB("B does not have full column rank")
    if any(sum(r[j] for r in rows) != 0 for j in range(ncols)):
        raise ValueError("columns of B must sum to zero")
    forms = [SparsePoly.linear_form(r) for r in rows]
    pairs = []
    for j in range(ncols):
        f = SparsePoly.one(ncols)
        g = SparsePoly.one(ncols)
        for i, r in enumerate(rows):
            if r[j] > 0:
                f = f * forms[i] ** r[j]
            elif r[j] < 0:
                g = g * forms[i] ** (-r[j])
        pairs.append((f, g))
    return pairs
