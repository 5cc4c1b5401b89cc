"""Linear syzygies and Koszul strands, one graded piece at a time."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from toricimplicit.arith import kernel_basis
from toricimplicit.modular import exact_rank
from toricimplicit.semigroup import RingElement, ToricRing


class DegreeMismatch(ValueError):
    pass


def _common_degree(h: Sequence[RingElement]):
    degs = {x.degree for x in h}
    if len(degs) != 1:
        raise DegreeMismatch(f"elements have different degrees: {sorted(map(str, degs))}")
    return degs.pop()


@dataclass(frozen=True)
class SyzygyBasis:
    ring: ToricRing
    nu: object
    generators: list  # tuples (a_0, ..., a_n) of RingElement of degree nu
    vectors: list  # the same syzygies as flat coefficient vectors, ordered (i, basis point)

    def __len__(self) -> int:
        return len(self.generators)


def multiplication_matrix(ring: ToricRing, h: Sequence[RingElement], nu) -> list:
    """Matrix of (a_i) -> sum a_i h_i from (A_nu)^(n+1) to A_(nu+d), columns ordered (i, m)."""
    d = _common_degree(h)
    nu = ring.norm_degree(nu)
    src = ring.basis(nu)
    tgt = ring.index(ring.add_degrees(nu, d))
    ncols = len(h) * len(src)
    rows = [[Fraction(0)] * ncols for _ in range(len(tgt))]
    for i, hi in enumerate(h):
        for j, m in enumerate(src):
            col = i * len(src) + j
            for q, c in hi.coeffs.items():
                r = tgt[tuple(a + b for a, b in zip(m, q))]
                rows[r][col] += c
    return rows


def syzygies_in_degree(ring: ToricRing, h: Sequence[RingElement], nu) -> SyzygyBasis:
    """Basis of {(a_i) in (A_nu)^(n+1) : sum a_i h_i = 0}, canonical echelon form."""
    nu = ring.norm_degree(nu)
    if not ring.is_valid_degree(nu):
        raise ValueError("nu must be non-negative")
    rows = multiplication_matrix(ring, h, nu)
    src = ring.basis(nu)
    ncols = len(h) * len(src)
    if not rows:
        vectors = [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    else:
        vectors = kernel_basis(rows)
    gens = []
    for v in vectors:
        gens.append(
            tuple(
                RingElement.from_vector(ring, nu, v[i * len(src):(i + 1) * len(src)])
                for i in range(len(h))
            )
        )
    return SyzygyBasis(ring, nu, gens, vectors)


@dataclass(frozen=True)
class KoszulColumn:
    label: tuple  # (pair index, basis point of degree nu - d_i)
    entries: dict  # row index -> {target variable index: coefficient}


def koszul_columns(ring: ToricRing, pairs: Sequence[tuple], nu) -> list:
    """Columns m*L_i for L_i = Y_i f_i - X_i g_i, targets ordered X_1, Y_1, ..., X_n, Y_n."""
    nu = ring.norm_degree(nu)
    rows = ring.index(nu)
    cols = []
    for i, (f, g) in enumerate(pairs):
        if f.degree != g.degree:
            raise DegreeMismatch(f"pair {i} has entries of different degrees")
        low = ring.sub_degrees(nu, f.degree)
        if not ring.is_valid_degree(low):
            continue
        x_var, y_var = 2 * i, 2 * i + 1
        for m in ring.basis(low):
            entries: dict = {}
            for elem, var, sign in ((f, y_var, 1), (g, x_var, -1)):
                for q, c in elem.coeffs.items():
                    r = rows[tuple(a + b for a, b in zip(m, q))]
                    slot = entries.setdefault(r, {})
                    slot[var] = slot.get(var, 0) + sign * c
            cols.append(KoszulColumn((i, m), {r: {k: v for k, v in e.items() if v} for r, e in entries.items()}))
    return cols


def koszul_differential(ring: ToricRing, h: Sequence[RingElement], nu, i: int) -> list:
    """Matrix of the i-th Koszul map on the strand: (A_nu)^C(n+1,i) -> (A_(nu+d))^C(n+1,i-1)."""
    d = _common_degree(h)
    nu = ring.norm_degree(nu)
    src = ring.basis(nu)
    tgt_index = ring.index(ring.add_degrees(nu, d))
    ntgt = len(tgt_index)
    k = len(h)
    subsets = list(itertools.combinations(range(k), i))
    lower = {s: j for j, s in enumerate(itertools.combinations(range(k), i - 1))}
    ncols = len(subsets) * len(src)
    rows = [[0] * ncols for _ in range(len(lower) * ntgt)]
    for si, subset in enumerate(subsets):
        for pos, var in enumerate(subset):
            sign = -1 if pos % 2 else 1
            face = lower[subset[:pos] + subset[pos + 1:]]
            for j, m in enumerate(src):
                col = si * len(src) + j
                for q, c in h[var].coeffs.items():
                    r = face * ntgt + tgt_index[tuple(a + b for a, b in zip(m, q))]
                    rows[r][col] += sign * c
    return rows


@dataclass(frozen=True)
class StrandDiagnostics:
    nu: object
    dims: list  # (i, dim of the i-th cycle module in the strand)
    euler: int

    @property
    def expected_det_degree(self) -> int:
        """sum_{i>=1} (-1)^(i+1) i dim Z_i: the degree of the determinant of the strand."""
        return sum((-1) ** (i + 1) * i * dim for i, dim in self.dims if i >= 1)

    def values(self) -> tuple:
        return tuple(dim for _, dim in self.dims)


def strand_dimension(ring: ToricRing, h: Sequence[RingElement], nu, i: int) -> int:
    src = len(ring.basis(nu))
    total = comb(len(h), i) * src
    if i == 0 or total == 0:
        return total
    rows = koszul_differential(ring, h, nu, i)
    return total - exact_rank(rows, total)


def strand_diagnostics(ring: ToricRing, h: Sequence[RingElement], nu) -> StrandDiagnostics:
    """Dimensions of the cycle modules Z_0 .. Z_n in the nu-strand and their Euler characteristic."""
    _common_degree(h)
    nu = ring.norm_degree(nu)
    n = len(h) - 1
    dims = [(i, strand_dimension(ring, h, nu, i)) for i in range(n + 1)]
    euler = sum((-1) ** i * dim for i, dim in dims)
    return StrandDiagnostics(nu, dims, euler)
