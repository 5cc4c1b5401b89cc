# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled modular elimination kernels (entries in [0, p), p < 2**31)."""

import numpy as np

ctypedef long long i64


cdef inline i64 _inv(i64 a, i64 p) nogil:
    cdef i64 t = 0, newt = 1, r = p, newr = a, q, tmp
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


def rref_mod(i64[:, ::1] a, i64 p):
    """In-place reduced row echelon form mod p; returns the pivot columns."""
    cdef Py_ssize_t rows = a.shape[0], cols = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef i64 inv, f, t
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, cols):
                t = a[piv, j]
                a[piv, j] = a[r, j]
                a[r, j] = t
        inv = _inv(a[r, c], p)
        for j in range(c, cols):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(rows):
            if i != r:
                f = a[i, c]
                if f != 0:
                    f = p - f
                    for j in range(c, cols):
                        if a[r, j] != 0:
                            a[i, j] = (a[i, j] + f * a[r, j]) % p
        pivots.append(c)
        r += 1
    return pivots


def rank_mod(i64[:, ::1] a, i64 p):
    """Rank mod p by forward elimination (destroys a)."""
    cdef Py_ssize_t rows = a.shape[0], cols = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef i64 inv, f, t
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, cols):
                t = a[piv, j]
                a[piv, j] = a[r, j]
                a[r, j] = t
        inv = _inv(a[r, c], p)
        for i in range(r + 1, rows):
            f = a[i, c]
            if f != 0:
                f = (p - f) * inv % p
                for j in range(c, cols):
                    if a[r, j] != 0:
                        a[i, j] = (a[i, j] + f * a[r, j]) % p
        r += 1
    return r


cdef i64 _det_inplace(i64[:, ::1] a, i64 p) nogil:
    cdef Py_ssize_t n = a.shape[0], k, i, j, piv
    cdef i64 det = 1, inv, f, t
    for k in range(n):
        piv = -1
        for i in range(k, n):
            if a[i, k] != 0:
                piv = i
                break
        if piv < 0:
            return 0
        if piv != k:
            for j in range(k, n):
                t = a[piv, j]
                a[piv, j] = a[k, j]
                a[k, j] = t
            det = (p - det) % p
        det = det * a[k, k] % p
        inv = _inv(a[k, k], p)
        for i in range(k + 1, n):
            f = a[i, k]
            if f != 0:
                f = (p - f) * inv % p
                for j in range(k, n):
                    a[i, j] = (a[i, j] + f * a[k, j]) % p
    return det


def det_mod(i64[:, ::1] a, i64 p):
    """Determinant mod p (destroys a)."""
    return _det_inplace(a, p)


def pencil_dets_mod(i64[:, ::1] A, i64[:, ::1] B, i64[::1] lams, i64 p):
    """det(A + lam*B) mod p for every lam in lams."""
    cdef Py_ssize_t n = A.shape[0], L = lams.shape[0], t, i, j
    out = np.zeros(L, dtype=np.int64)
    cdef i64[::1] res = out
    work = np.empty((n, n), dtype=np.int64)
    cdef i64[:, ::1] w = work
    cdef i64 lam
    for t in range(L):
        lam = lams[t] % p
        for i in range(n):
            for j in range(n):
                w[i, j] = (A[i, j] + lam * B[i, j]) % p
        res[t] = _det_inplace(w, p)
    return out
