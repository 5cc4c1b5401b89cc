"""Certified multimodular linear algebra over Q.

Kernels and ranks are computed modulo word-size primes, lifted by Chinese
remaindering and rational reconstruction, and then checked exactly over Q, so
results equal those of plain Fraction elimination. The elimination kernels
come from the compiled extension when it is importable and from a numpy
implementation otherwise; set TORICIMPLICIT_BACKEND=python to force the
fallback.
"""

from __future__ import annotations

import importlib
import math
import os
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np


def load_kernels(name: str | None = None):
    """Return (module, backend name); name is 'cython', 'python' or None for the default."""
    if name is None:
        name = os.environ.get("TORICIMPLICIT_BACKEND", "").lower() or "auto"
    if name in ("auto", "cython"):
        try:
            return importlib.import_module("toricimplicit._kernels"), "cython"
        except ImportError:
            if name == "cython":
                raise
    return importlib.import_module("toricimplicit._kernels_py"), "python"


kernels, BACKEND = load_kernels()


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_PRIMES: list[int] = []


def primes() -> Iterator[int]:
    """Deterministic stream of primes just below 2**31."""
    i = 0
    while True:
        while i >= len(_PRIMES):
            start = _PRIMES[-1] - 2 if _PRIMES else 2**31 - 1
            n = start
            while not _is_prime(n):
                n -= 2
            _PRIMES.append(n)
        yield _PRIMES[i]
        i += 1


def ratrecon(a: int, m: int) -> Fraction | None:
    """Rational r/s with r = a*s mod m and |r|, |s| <= sqrt(m/2), or None."""
    a %= m
    bound = math.isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def to_mod_array(rows: Sequence[Sequence[int]], p: int) -> np.ndarray:
    return np.array([[x % p for x in row] for row in rows], dtype=np.int64).reshape(len(rows), -1)


def integer_rows(rows: Sequence[Sequence]) -> list:
    """Scale each rational row by the lcm of its denominators."""
    out = []
    for row in rows:
        den = 1
        for x in row:
            d = x.denominator if isinstance(x, Fraction) else 1
            den = den * d // math.gcd(den, d)
        out.append([int(x * den) for x in row])
    return out


def rank_mod(int_rows: Sequence[Sequence[int]], p: int) -> int:
    if not int_rows:
        return 0
    return int(kernels.rank_mod(to_mod_array(int_rows, p), p))


class _CRT:
    """Elementwise Chinese remaindering of residue arrays (object dtype for big ints)."""

    def __init__(self):
        self.modulus = 1
        self.values = None

    def add(self, residues: np.ndarray, p: int) -> None:
        res = residues.astype(object)
        if self.values is None:
            self.values = res
            self.modulus = p
            return
        m = self.modulus
        inv = pow(m % p, -1, p)
        diff = (res - (self.values % p)) * inv % p
        self.values = self.values + diff * m
        self.modulus = m * p

    def reconstruct(self) -> list | None:
        out = []
        m = self.modulus
        for v in self.values.ravel():
            f = ratrecon(int(v), m)
            if f is None:
                return None
            out.append(f)
        return out


def kernel_basis_modular(rows: Sequence[Sequence], ncols: int, max_primes: int = 400) -> list:
    """Canonical reduced kernel basis (same as exact elimination), via certified lifting."""
    from toricimplicit.arith import _kernel_from_rref, rref

    int_rows = [r for r in integer_rows(rows) if any(r)]
    if not int_rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    sparse = [[(j, x) for j, x in enumerate(r) if x] for r in int_rows]
    best_pivots = None
    crt = _CRT()
    used = 0
    for p in primes():
        used += 1
        if used > max_primes:
            break
        a = to_mod_array(int_rows, p)
        pivots = list(kernels.rref_mod(a, p))
        if best_pivots is None or len(pivots) > len(best_pivots) or (
            len(pivots) == len(best_pivots) and pivots < best_pivots
        ):
            best_pivots = pivots
            crt = _CRT()
        elif pivots != best_pivots:
            continue
        r = len(pivots)
        free = [j for j in range(ncols) if j not in set(pivots)]
        if not free:
            return []
        if r == 0:
            return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
        block = (-a[:r][:, free]) % p
        crt.add(block, p)
        if crt.modulus.bit_length() < 62:
            continue
        values = crt.reconstruct()
        if values is None:
            continue
        basis = _assemble(values, best_pivots, free, ncols)
        status = _certify(basis, sparse, best_pivots, free)
        if status == "ok":
            return basis
        if status == "support":
            break
    reduced, piv = rref(rows)
    return _kernel_from_rref(reduced, piv, ncols)


def _assemble(values: list, pivots: list, free: list, ncols: int) -> list:
    nfree = len(free)
    basis = []
    for k, f in enumerate(free):
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = values[i * nfree + k]
        basis.append(v)
    return basis


def _certify(basis: list, sparse_rows: list, pivots: list, free: list) -> str:
    for f, v in zip(free, basis):
        if any(v[pc] for pc in pivots if pc > f):
            return "support"
        den = 1
        for x in v:
            if x:
                den = den * x.denominator // math.gcd(den, x.denominator)
        w = {j: int(x * den) for j, x in enumerate(v) if x}
        for row in sparse_rows:
            if sum(c * w.get(j, 0) for j, c in row):
                return "wrong"
    return "ok"


def exact_rank(rows: Sequence[Sequence], ncols: int) -> int:
    """Exact rank over Q: a modular rank certified by an exact kernel when not maximal."""
    int_rows = [r for r in integer_rows(rows) if any(r)]
    if not int_rows:
        return 0
    gen = primes()
    r = max(rank_mod(int_rows, next(gen)) for _ in range(2))
    nrows = len(int_rows)
    if r == min(nrows, ncols):
        return r
    if ncols <= nrows:
        return ncols - len(kernel_basis_modular(int_rows, ncols))
    transposed = [list(col) for col in zip(*int_rows)]
    return nrows - len(kernel_basis_modular(transposed, nrows))


# ---------------------------------------------------------------------------
# univariate polynomials mod p, coefficient lists low -> high


def poly_trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def interpolate_mod(xs: Sequence[int], ys: Sequence[int], p: int) -> list:
    """Coefficients of the polynomial of degree < len(xs) through the points, mod p."""
    n = len(xs)
    coef = [int(y) % p for y in ys]
    # Newton divided differences
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) * pow((xs[i] - xs[i - j]) % p, -1, p) % p
    out = [0] * n
    for i in range(n - 1, -1, -1):
        # out = out * (x - xs[i]) + coef[i]
        nxt = [0] * n
        for k in range(n - 1):
            if out[k]:
                nxt[k + 1] = (nxt[k + 1] + out[k]) % p
                nxt[k] = (nxt[k] - out[k] * xs[i]) % p
        nxt[0] = (nxt[0] + coef[i]) % p
        out = nxt
    return poly_trim(out)


def poly_rem_mod(a: list, b: list, p: int) -> list:
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    while len(a) - 1 >= db and a:
        f = a[-1] * inv % p
        shift = len(a) - 1 - db
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - f * c) % p
        poly_trim(a)
    return a


def poly_gcd_mod(a: list, b: list, p: int) -> list:
    """Monic gcd mod p."""
    a, b = poly_trim(list(a)), poly_trim(list(b))
    while b:
        a, b = b, poly_rem_mod(a, b, p)
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """(a @ b) mod p for entries in [0, p) without int64 overflow (b split in 16-bit halves)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    lo = b & 0xFFFF
    hi = b >> 16
    chunk = max(1, (1 << 62) // max(1, (p - 1) * 0xFFFF))
    n = a.shape[-1]
    out_lo = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    out_hi = np.zeros_like(out_lo)
    for start in range(0, n, chunk):
        sl = slice(start, start + chunk)
        out_lo = (out_lo + a[..., sl] @ lo[sl]) % p
        out_hi = (out_hi + a[..., sl] @ hi[sl]) % p
    return (out_hi * 65536 + out_lo) % p


def vandermonde_inverse(xs: Sequence[int], p: int) -> np.ndarray:
    """Inverse of V[i][j] = xs[i]**j mod p, so that coefficients = Vinv @ values."""
    n = len(xs)
    aug = [[pow(x, j, p) for j in range(n)] + [int(i == k) for k in range(n)] for i, x in enumerate(xs)]
    arr = np.array(aug, dtype=np.int64)
    pivots = list(kernels.rref_mod(arr, p))
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("interpolation nodes are not distinct mod p")
    return arr[:, n:].copy()
