"""Fallback modular elimination kernels written with numpy (same API as the compiled module)."""

from __future__ import annotations

import numpy as np


def rref_mod(a: np.ndarray, p: int) -> list:
    """In-place reduced row echelon form mod p; returns the pivot columns."""
    rows, cols = a.shape
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv], c:] = a[[piv, r], c:]
        inv = pow(int(a[r, c]), -1, p)
        a[r, c:] = a[r, c:] * inv % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit, c:] = (a[hit, c:] - np.outer(col[hit], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return pivots


def rank_mod(a: np.ndarray, p: int) -> int:
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv], c:] = a[[piv, r], c:]
        inv = pow(int(a[r, c]), -1, p)
        below = a[r + 1:, c] * inv % p
        hit = np.flatnonzero(below)
        if hit.size:
            a[r + 1 + hit, c:] = (a[r + 1 + hit, c:] - np.outer(below[hit], a[r, c:])) % p
        r += 1
    return r


def det_mod(a: np.ndarray, p: int) -> int:
    return int(_batched_det(a[None, :, :], p)[0])


def _batched_det(m: np.ndarray, p: int) -> np.ndarray:
    """Determinants mod p of a stack of square matrices (destroys m)."""
    L, n, _ = m.shape
    det = np.ones(L, dtype=np.int64)
    alive = np.ones(L, dtype=bool)
    idx = np.arange(L)
    for k in range(n):
        nz = m[:, k:, k] != 0
        has = nz.any(axis=1)
        alive &= has
        piv = k + np.argmax(nz, axis=1)
        swap = (piv != k) & alive
        if swap.any():
            s = idx[swap]
            rows_k = m[s, k, :].copy()
            m[s, k, :] = m[s, piv[swap], :]
            m[s, piv[swap], :] = rows_k
            det[s] = (p - det[s]) % p
        pivots = m[:, k, k].copy()
        pivots[~alive] = 1
        det = det * pivots % p
        if k + 1 < n:
            inv = np.array([pow(int(x), -1, p) for x in pivots], dtype=np.int64)
            f = m[:, k + 1:, k] * inv[:, None] % p
            m[:, k + 1:, k:] = (m[:, k + 1:, k:] - f[:, :, None] * m[:, k:k + 1, k:]) % p
    det[~alive] = 0
    return det


def pencil_dets_mod(A: np.ndarray, B: np.ndarray, lams: np.ndarray, p: int) -> np.ndarray:
    """det(A + lam*B) mod p for every lam in lams."""
    lam = (lams % p)[:, None, None]
    stack = (A[None, :, :] + lam * B[None, :, :]) % p
    return _batched_det(stack, p)
