"""Exact arithmetic in GF(p) and in the quadratic extension GF(p^2).

Scalars are encoded as plain Python ints in ``0..q-1`` with ``q = p**e``.
For ``e == 2`` the value ``a0 + p*a1`` encodes ``a0 + a1*t`` where ``t`` is a
fixed root of ``t^2 = eps`` and ``eps`` is the smallest quadratic nonresidue
mod p.  The encoding is shared with the vectorized kernels, which decompose
values on the fly, so a single int64 array represents a vector over either
field.
"""

from __future__ import annotations

import numpy as np
import sympy


class ParameterError(ValueError):
    """Invalid construction parameters (non-prime p, p <= 3, bad family)."""


class DomainError(ValueError):
    """Operation applied outside its mathematical domain."""


def _euler_square(a: int, p: int) -> bool:
    return a % p == 0 or pow(a % p, (p - 1) // 2, p) == 1


def _smallest_nonresidue(p: int) -> int:
    for a in range(2, p):
        if not _euler_square(a, p):
            return a
    raise ParameterError(f"no quadratic nonresidue mod {p}")


class Field:
    """GF(p) (ext_degree 1) or GF(p^2) (ext_degree 2, defined by t^2 = eps)."""

    def __init__(self, p: int, ext_degree: int = 1, eps: int = 0):
        self.p = p
        self.ext_degree = ext_degree
        self.eps = eps
        self.q = p**ext_degree
        self.sqrt_minus_one: int | None = None
        self.sqrt_two: int | None = None
        self._sqrt_table: dict[int, int] | None = None
        self._inv_table: np.ndarray | None = None

    def __repr__(self):
        if self.ext_degree == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^2; t^2={self.eps})"

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and (self.p, self.ext_degree, self.eps)
            == (other.p, other.ext_degree, other.eps)
        )

    def __hash__(self):
        return hash((self.p, self.ext_degree, self.eps))

    # -- scalar operations on encoded ints ---------------------------------

    def from_int(self, n: int) -> int:
        return n % self.p

    def split(self, x: int) -> tuple[int, int]:
        return x % self.p, x // self.p

    def join(self, a0: int, a1: int) -> int:
        return a0 % self.p + self.p * (a1 % self.p)

    def add(self, x: int, y: int) -> int:
        p = self.p
        return (x % p + y % p) % p + p * ((x // p + y // p) % p)

    def sub(self, x: int, y: int) -> int:
        p = self.p
        return (x % p - y % p) % p + p * ((x // p - y // p) % p)

    def neg(self, x: int) -> int:
        p = self.p
        return (-(x % p)) % p + p * ((-(x // p)) % p)

    def mul(self, x: int, y: int) -> int:
        p = self.p
        x0, x1 = x % p, x // p
        y0, y1 = y % p, y // p
        r0 = (x0 * y0 + self.eps * x1 * y1) % p
        r1 = (x0 * y1 + x1 * y0) % p
        return r0 + p * r1

    def inv(self, x: int) -> int:
        if x == 0:
            raise DomainError("inverse of zero")
        p = self.p
        if self.ext_degree == 1:
            return pow(x, p - 2, p)
        x0, x1 = x % p, x // p
        # norm = x * conj(x) = x0^2 - eps*x1^2 lies in the prime field
        nrm = (x0 * x0 - self.eps * x1 * x1) % p
        ninv = pow(nrm, p - 2, p)
        return (x0 * ninv) % p + p * ((-x1 * ninv) % p)

    def pow(self, x: int, k: int) -> int:
        r = 1
        b = x
        while k:
            if k & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            k >>= 1
        return r

    # -- square roots -------------------------------------------------------

    def _sqrts(self) -> dict[int, int]:
        # one pass in encoding order: first root recorded is the canonical one
        if self._sqrt_table is None:
            tbl: dict[int, int] = {}
            for r in range(self.q):
                tbl.setdefault(self.mul(r, r), r)
            self._sqrt_table = tbl
        return self._sqrt_table

    def is_square(self, a: int) -> bool:
        return a in self._sqrts()

    def sqrt(self, a: int) -> int:
        try:
            return self._sqrts()[a]
        except KeyError:
            raise DomainError(f"{a} is not a square in {self!r}") from None

    # -- vectorized operations on int64 arrays ------------------------------

    def varr(self, data) -> np.ndarray:
        return np.asarray(data, dtype=np.int64)

    def vadd(self, x, y):
        p = self.p
        return (x % p + y % p) % p + p * ((x // p + y // p) % p)

    def vsub(self, x, y):
        p = self.p
        return (x % p - y % p) % p + p * ((x // p - y // p) % p)

    def vneg(self, x):
        p = self.p
        return (-(x % p)) % p + p * ((-(x // p)) % p)

    def vmul(self, x, y):
        p = self.p
        x0, x1 = x % p, x // p
        y0, y1 = y % p, y // p
        return (x0 * y0 + self.eps * ((x1 * y1) % p)) % p + p * ((x0 * y1 + x1 * y0) % p)

    def vscale(self, c: int, x):
        p = self.p
        c0, c1 = c % p, c // p
        x0, x1 = x % p, x // p
        return (c0 * x0 + self.eps * ((c1 * x1) % p)) % p + p * ((c0 * x1 + c1 * x0) % p)

    def mat_mul(self, a, b):
        """Exact matrix product of encoded arrays."""
        p = self.p
        a0, a1 = a % p, a // p
        b0, b1 = b % p, b // p
        if self.ext_degree == 1:
            return (a0 @ b0) % p
        c0 = (a0 @ b0 + self.eps * ((a1 @ b1) % p)) % p
        c1 = (a0 @ b1 + a1 @ b0) % p
        return c0 + p * c1

    def inv_table(self) -> np.ndarray:
        if self._inv_table is None:
            tbl = np.zeros(self.q, dtype=np.int64)
            for x in range(1, self.q):
                tbl[x] = self.inv(x)
            self._inv_table = tbl
        return self._inv_table


def make_field(p: int, need_roots: bool) -> Field:
    """GF(p), or GF(p^2) when requested square roots force an extension.

    With ``need_roots`` the returned field carries canonical values of
    sqrt(-1) and sqrt(2), which exist in GF(p) itself only when both -1 and 2
    are squares mod p.
    """
    if not sympy.isprime(p) or p <= 3:
        raise ParameterError(f"p must be a prime > 3, got {p}")
    if not need_roots:
        return Field(p, 1)
    if _euler_square(-1, p) and _euler_square(2, p):
        f = Field(p, 1)
    else:
        f = Field(p, 2, _smallest_nonresidue(p))
    f.sqrt_minus_one = f.sqrt(f.from_int(-1))
    f.sqrt_two = f.sqrt(f.from_int(2))
    return f


def sqrt_in_field(f: Field, a: int) -> int:
    """Canonical square root: the smallest encoded value r with r*r == a."""
    return f.sqrt(a)
