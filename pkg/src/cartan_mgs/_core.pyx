# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: bracket application through sparse structure constants
and reduced-row-echelon insertion, over GF(p) / GF(p^2) encoded scalars."""

import numpy as np

BACKEND = "compiled"


cdef inline long long fmul(long long x, long long y, long long p, long long eps) nogil:
    cdef long long x0 = x % p
    cdef long long x1 = x / p
    cdef long long y0 = y % p
    cdef long long y1 = y / p
    cdef long long r0 = (x0 * y0 + eps * x1 * y1) % p
    cdef long long r1 = (x0 * y1 + x1 * y0) % p
    return r0 + p * r1


cdef inline long long fadd(long long x, long long y, long long p) nogil:
    return (x % p + y % p) % p + p * ((x / p + y / p) % p)


cdef inline long long fsub(long long x, long long y, long long p) nogil:
    cdef long long a = (x % p - y % p) % p
    cdef long long b = (x / p - y / p) % p
    if a < 0:
        a += p
    if b < 0:
        b += p
    return a + p * b


def ad_block(long long[::1] ptr, int[::1] bcols, int[::1] kcols,
             long long[::1] vals, long long[::1] v,
             long long d_j, long long d_k, long long p, long long eps):
    M = np.zeros((d_j, d_k), dtype=np.int64)
    cdef long long[:, ::1] Mv = M
    cdef Py_ssize_t a, s
    cdef long long va, c
    cdef Py_ssize_t na = ptr.shape[0] - 1
    with nogil:
        for a in range(na):
            va = v[a]
            if va == 0:
                continue
            for s in range(ptr[a], ptr[a + 1]):
                c = fmul(va, vals[s], p, eps)
                Mv[bcols[s], kcols[s]] = fadd(Mv[bcols[s], kcols[s]], c, p)
    return M


def rref_insert_batch(long long[:, ::1] mat, long long[::1] piv, long long nrows,
                      long long[:, ::1] rows, long long p, long long eps,
                      long long[::1] invtab):
    cdef Py_ssize_t nb = rows.shape[0]
    cdef Py_ssize_t d = rows.shape[1]
    cdef Py_ssize_t idx, r, col, pos
    cdef long long x, c, inv
    cdef long long nr = nrows
    with nogil:
        for idx in range(nb):
            for r in range(nr):
                x = rows[idx, piv[r]]
                if x:
                    for col in range(d):
                        if mat[r, col]:
                            rows[idx, col] = fsub(rows[idx, col], fmul(x, mat[r, col], p, eps), p)
            c = -1
            for col in range(d):
                if rows[idx, col]:
                    c = col
                    break
            if c < 0:
                continue
            inv = invtab[rows[idx, c]]
            if inv != 1:
                for col in range(d):
                    if rows[idx, col]:
                        rows[idx, col] = fmul(inv, rows[idx, col], p, eps)
            for r in range(nr):
                x = mat[r, c]
                if x:
                    for col in range(d):
                        if rows[idx, col]:
                            mat[r, col] = fsub(mat[r, col], fmul(x, rows[idx, col], p, eps), p)
            for r in range(idx + 1, nb):
                x = rows[r, c]
                if x:
                    for col in range(d):
                        if rows[idx, col]:
                            rows[r, col] = fsub(rows[r, col], fmul(x, rows[idx, col], p, eps), p)
            pos = nr
            for r in range(nr):
                if piv[r] > c:
                    pos = r
                    break
            for r in range(nr, pos, -1):
                piv[r] = piv[r - 1]
                for col in range(d):
                    mat[r, col] = mat[r - 1, col]
            piv[pos] = c
            for col in range(d):
                mat[pos, col] = rows[idx, col]
            nr += 1
    return nr
