"""Pure numpy fallback for the hot kernels.

Same contract as the compiled ``_core`` extension.  Scalars are encoded field
ints (``a0 + p*a1``); field addition is componentwise mod p, so sums are
accumulated on the two planes separately and reduced once at the end.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _vscale(c: int, x: np.ndarray, p: int, eps: int) -> np.ndarray:
    c0, c1 = c % p, c // p
    x0, x1 = x % p, x // p
    return (c0 * x0 + eps * ((c1 * x1) % p)) % p + p * ((c0 * x1 + c1 * x0) % p)


def ad_block(ptr, bcols, kcols, vals, v, d_j, d_k, p, eps):
    """Matrix of u -> [v, u] on one degree block.

    Row b, column k of the result is the coefficient of target basis vector k
    in the bracket of ``v`` with source basis vector b.
    """
    m0 = np.zeros((d_j, d_k), dtype=np.int64)
    m1 = np.zeros((d_j, d_k), dtype=np.int64)
    for a in np.nonzero(v)[0]:
        s, e = ptr[a], ptr[a + 1]
        if s == e:
            continue
        cv = _vscale(int(v[a]), vals[s:e], p, eps)
        np.add.at(m0, (bcols[s:e], kcols[s:e]), cv % p)
        np.add.at(m1, (bcols[s:e], kcols[s:e]), cv // p)
    return (m0 % p) + p * (m1 % p)


def rref_insert_batch(mat, piv, nrows, rows, p, eps, invtab):
    """Insert candidate rows into a reduced-row-echelon basis, in order.

    ``mat`` and ``piv`` are mutated in place (capacity >= full dimension) and
    stay in canonical form: pivots are 1, pivot columns are cleared elsewhere
    and rows are sorted by pivot column.  Returns the new row count.
    """
    nb = rows.shape[0]
    for idx in range(nb):
        row = rows[idx]
        if nrows:
            coeff = row[piv[:nrows]]
            if np.any(coeff):
                red = coeff[None, :] if coeff.ndim == 1 else coeff
                prod = _mat_mul(red, mat[:nrows], p, eps)[0]
                row = _vsub(row, prod, p)
            rows[idx] = row
        nz = np.nonzero(row)[0]
        if nz.size == 0:
            continue
        c = int(nz[0])
        row = _vscale(int(invtab[row[c]]), row, p, eps)
        # clear column c in existing rows
        if nrows:
            col = mat[:nrows, c]
            hit = np.nonzero(col)[0]
            if hit.size:
                upd = _vscale_rows(col[hit], row, p, eps)
                mat[hit] = _vsub(mat[hit], upd, p)
        # clear column c in the remaining batch rows
        if idx + 1 < nb:
            col = rows[idx + 1 :, c]
            hit = np.nonzero(col)[0]
            if hit.size:
                upd = _vscale_rows(col[hit], row, p, eps)
                rows[idx + 1 + hit] = _vsub(rows[idx + 1 + hit], upd, p)
        pos = int(np.searchsorted(piv[:nrows], c))
        if pos < nrows:
            mat[pos + 1 : nrows + 1] = mat[pos:nrows]
            piv[pos + 1 : nrows + 1] = piv[pos:nrows]
        mat[pos] = row
        piv[pos] = c
        nrows += 1
    return nrows


def _vsub(x, y, p):
    return (x % p - y % p) % p + p * ((x // p - y // p) % p)


def _vscale_rows(cs, row, p, eps):
    # outer field product cs[i] * row[j]
    c0, c1 = (cs % p)[:, None], (cs // p)[:, None]
    x0, x1 = row % p, row // p
    return (c0 * x0 + eps * ((c1 * x1) % p)) % p + p * ((c0 * x1 + c1 * x0) % p)


def _mat_mul(a, b, p, eps):
    a0, a1 = a % p, a // p
    b0, b1 = b % p, b // p
    c0 = (a0 @ b0 + eps * ((a1 @ b1) % p)) % p
    c1 = (a0 @ b1 + a1 @ b0) % p
    return c0 + p * c1
