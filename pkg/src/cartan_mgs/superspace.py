"""The divided power superalgebra O(m,n): truncated divided powers tensor an
exterior algebra, with superderivations and linear-substitution endomorphisms.

Monomials are pairs ``(alpha, mask)``: ``alpha`` is the divided-power
multi-index over the m even variables (entries in 0..p-1) and ``mask`` is a
bitmask over the n odd variables (bit b is odd variable m+b, 0-based).  With
``z_weighted`` the last even variable carries Z-degree 2 (contact grading).
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .scalars import DomainError, Field, ParameterError

Monomial = tuple[tuple[int, ...], int]


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _merge_sign(u: int, v: int) -> int:
    """Parity of the permutation merging the sorted tuples behind u and v."""
    inv = 0
    b = v
    while b:
        low = b & -b
        inv += _popcount(u & ~(low - 1) & ~low)
        b &= b - 1
    return -1 if inv & 1 else 1


class Superspace:
    def __init__(self, m: int, n: int, field: Field, z_weighted: bool = False):
        if m < 2 or n < 2:
            raise ParameterError("need m >= 2 and n >= 2")
        self.m = m
        self.n = n
        self.F = field
        self.p = field.p
        self.z_weighted = z_weighted
        self.z_index = m - 1 if z_weighted else None
        self.nvars = m + n
        self._binom = self._binom_table(field.p)
        self._basis_by_deg: dict[int, list[Monomial]] | None = None
        self._index: dict[Monomial, int] = {}

    @staticmethod
    def _binom_table(p: int):
        tbl = [[0] * p for _ in range(p)]
        for a in range(p):
            tbl[a][0] = 1
            for b in range(1, a + 1):
                tbl[a][b] = (tbl[a - 1][b - 1] + tbl[a - 1][b]) % p
        return tbl

    # -- monomial structure --------------------------------------------------

    def one(self) -> Monomial:
        return ((0,) * self.m, 0)

    def variable(self, i: int) -> Monomial:
        """Monomial x_i, 0-based index over all m+n variables."""
        if i < self.m:
            alpha = tuple(1 if j == i else 0 for j in range(self.m))
            return (alpha, 0)
        return ((0,) * self.m, 1 << (i - self.m))

    def var_parity(self, i: int) -> int:
        return 0 if i < self.m else 1

    def parity(self, mon: Monomial) -> int:
        return _popcount(mon[1]) & 1

    def zdeg(self, mon: Monomial) -> int:
        d = sum(mon[0]) + _popcount(mon[1])
        if self.z_index is not None:
            d += mon[0][self.z_index]
        return d

    def top_degree(self) -> int:
        return (self.m + (1 if self.z_weighted else 0)) * (self.p - 1) + self.n

    def mono_key(self, mon: Monomial):
        # graded order; within a degree odd-free monomials (mask 0) come first
        # so the degree-1 slice is x_1..x_m then the odd variables
        return (self.zdeg(mon), mon[1], tuple(reversed(mon[0])))

    def basis_by_degree(self) -> dict[int, list[Monomial]]:
        if self._basis_by_deg is None:
            by_deg: dict[int, list[Monomial]] = {}
            for alpha in itertools.product(range(self.p), repeat=self.m):
                for mask in range(1 << self.n):
                    mon = (alpha, mask)
                    by_deg.setdefault(self.zdeg(mon), []).append(mon)
            for d in by_deg:
                by_deg[d].sort(key=self.mono_key)
            self._basis_by_deg = dict(sorted(by_deg.items()))
            pos = 0
            for d, mons in self._basis_by_deg.items():
                for mon in mons:
                    self._index[mon] = pos
                    pos += 1
        return self._basis_by_deg

    def dim(self) -> int:
        return (2**self.n) * (self.p**self.m)

    # -- monomial arithmetic -------------------------------------------------

    def mono_mul(self, a: Monomial, b: Monomial):
        """(coeff, monomial) or None when the product vanishes."""
        if a[1] & b[1]:
            return None
        coeff = 1
        alpha = []
        for x, y in zip(a[0], b[0]):
            if x + y >= self.p:
                return None
            coeff = (coeff * self._binom[x + y][x]) % self.p
            alpha.append(x + y)
        sign = _merge_sign(a[1], b[1])
        if sign < 0:
            coeff = (-coeff) % self.p
        if coeff == 0:
            return None
        return coeff, (tuple(alpha), a[1] | b[1])

    def mono_derive(self, i: int, mon: Monomial):
        """(coeff, monomial) for the i-th superderivation, or None."""
        alpha, mask = mon
        if i < self.m:
            if alpha[i] == 0:
                return None
            a = list(alpha)
            a[i] -= 1
            return 1, (tuple(a), mask)
        bit = 1 << (i - self.m)
        if not mask & bit:
            return None
        before = _popcount(mask & (bit - 1))
        coeff = (self.p - 1) if before & 1 else 1
        return coeff, (alpha, mask & ~bit)

    def __repr__(self):
        kind = "contact-graded " if self.z_weighted else ""
        return f"O({self.m},{self.n}) over {self.F!r} [{kind}dim {self.dim()}]"


class SPoly:
    """Sparse superpolynomial: monomial -> nonzero encoded field coefficient."""

    __slots__ = ("S", "c")

    def __init__(self, space: Superspace, coeffs: dict[Monomial, int] | None = None):
        self.S = space
        self.c = coeffs or {}

    @classmethod
    def mono(cls, space: Superspace, mon: Monomial, coeff: int = 1):
        return cls(space, {mon: coeff} if coeff else {})

    @classmethod
    def one(cls, space: Superspace, coeff: int = 1):
        return cls.mono(space, space.one(), coeff)

    def copy(self):
        return SPoly(self.S, dict(self.c))

    def is_zero(self) -> bool:
        return not self.c

    def __eq__(self, other):
        return isinstance(other, SPoly) and self.S is other.S and self.c == other.c

    def __hash__(self):
        raise TypeError("unhashable")

    def add_term(self, mon: Monomial, coeff: int):
        F = self.S.F
        cur = self.c.get(mon)
        if cur is None:
            if coeff:
                self.c[mon] = coeff
        else:
            s = F.add(cur, coeff)
            if s:
                self.c[mon] = s
            else:
                del self.c[mon]

    def __add__(self, other):
        out = self.copy()
        for mon, coeff in other.c.items():
            out.add_term(mon, coeff)
        return out

    def __sub__(self, other):
        F = self.S.F
        out = self.copy()
        for mon, coeff in other.c.items():
            out.add_term(mon, F.neg(coeff))
        return out

    def scale(self, k: int):
        F = self.S.F
        if k == 0:
            return SPoly(self.S)
        return SPoly(self.S, {mon: F.mul(k, c) for mon, c in self.c.items()})

    def __mul__(self, other):
        S = self.S
        F = S.F
        out = SPoly(S)
        for ma, ca in self.c.items():
            for mb, cb in other.c.items():
                r = S.mono_mul(ma, mb)
                if r is None:
                    continue
                out.add_term(r[1], F.mul(F.mul(ca, cb), r[0]))
        return out

    def parity(self) -> int:
        ps = {self.S.parity(mon) for mon in self.c}
        if len(ps) > 1:
            raise DomainError("polynomial is not Z2-homogeneous")
        return ps.pop() if ps else 0

    def zdeg(self) -> int:
        ds = {self.S.zdeg(mon) for mon in self.c}
        if len(ds) > 1:
            raise DomainError("polynomial is not Z-homogeneous")
        return ds.pop() if ds else 0

    def homogeneous_components(self) -> dict[int, "SPoly"]:
        out: dict[int, SPoly] = {}
        for mon, c in self.c.items():
            out.setdefault(self.S.zdeg(mon), SPoly(self.S)).c[mon] = c
        return dict(sorted(out.items()))

    def __repr__(self):
        if not self.c:
            return "0"
        bits = []
        for mon in sorted(self.c, key=self.S.mono_key):
            alpha, mask = mon
            parts = []
            for i, a in enumerate(alpha):
                if a == 1:
                    parts.append(f"x{i + 1}")
                elif a > 1:
                    parts.append(f"x{i + 1}^({a})")
            for b in range(self.S.n):
                if mask >> b & 1:
                    parts.append(f"x{self.S.m + b + 1}")
            name = "*".join(parts) or "1"
            bits.append(f"{self.c[mon]}*{name}")
        return " + ".join(bits)


def superderive(i: int, f: SPoly) -> SPoly:
    """The superderivation with d_i(x_j) = delta_ij, 0-based variable index."""
    S = f.S
    if not 0 <= i < S.nvars:
        raise DomainError(f"variable index {i} out of range")
    out = SPoly(S)
    for mon, c in f.c.items():
        r = S.mono_derive(i, mon)
        if r is not None:
            out.add_term(r[1], S.F.mul(c, S.F.from_int(r[0])))
    return out


def degree_derivation(f: SPoly, omit: int | None = None) -> SPoly:
    """sum_i x_i d_i over all variables, or omitting the distinguished one."""
    S = f.S
    if omit is not None and omit != S.z_index:
        raise DomainError("only the contact variable may be omitted")
    out = SPoly(S)
    for mon, c in f.c.items():
        e = sum(mon[0]) + _popcount(mon[1])
        if omit is not None:
            e -= mon[0][omit]
        out.add_term(mon, S.F.mul(c, S.F.from_int(e)))
    return out


def delta(a: SPoly) -> SPoly:
    """2a minus the degree derivation omitting the contact variable."""
    S = a.S
    if S.z_index is None:
        raise DomainError("delta requires the contact-graded superspace")
    out = SPoly(S)
    for mon, c in a.c.items():
        e = 2 - (sum(mon[0]) + _popcount(mon[1]) - mon[0][S.z_index])
        out.add_term(mon, S.F.mul(c, S.F.from_int(e)))
    return out


@lru_cache(maxsize=None)
def _factorial_inv(p: int, k: int) -> int:
    f = 1
    for j in range(2, k + 1):
        f = (f * j) % p
    return pow(f, p - 2, p)


class Substitution:
    """Algebra endomorphism of O(m,n) induced by images of the variables.

    Even variables are exponentiated through the divided power law
    (u^(k) = u^k / k!, exact for k < p), odd variables through exterior
    products.  Images must preserve parity and Z-degree.
    """

    def __init__(self, space: Superspace, images: list[SPoly]):
        if len(images) != space.nvars:
            raise ParameterError("need one image per variable")
        self.S = space
        self.images = images
        for i, img in enumerate(images):
            if img.is_zero():
                raise DomainError("singular substitution: zero image")
            if img.parity() != space.var_parity(i):
                raise DomainError(f"image of variable {i} violates parity")
            want = 2 if i == space.z_index else 1
            if img.zdeg() != want:
                raise DomainError(f"image of variable {i} must have degree {want}")
        self._powers: dict[tuple[int, int], SPoly] = {}

    @classmethod
    def identity(cls, space: Superspace):
        return cls(space, [SPoly.mono(space, space.variable(i)) for i in range(space.nvars)])

    def _power(self, i: int, k: int) -> SPoly:
        key = (i, k)
        got = self._powers.get(key)
        if got is None:
            S = self.S
            if k == 0:
                got = SPoly.one(S)
            else:
                got = self.images[i]
                for _ in range(k - 1):
                    got = got * self.images[i]
                got = got.scale(S.F.from_int(_factorial_inv(S.p, k)))
            self._powers[key] = got
        return got

    def apply(self, f: SPoly) -> SPoly:
        S = self.S
        out = SPoly(S)
        for mon, c in f.c.items():
            alpha, mask = mon
            acc = SPoly.one(S, c)
            for i, a in enumerate(alpha):
                if a:
                    acc = acc * self._power(i, a)
                    if acc.is_zero():
                        break
            if not acc.is_zero():
                for b in range(S.n):
                    if mask >> b & 1:
                        acc = acc * self.images[S.m + b]
                        if acc.is_zero():
                            break
            for mon2, c2 in acc.c.items():
                out.add_term(mon2, c2)
        return out


def substitute(space: Superspace, images: list[SPoly]) -> Substitution:
    return Substitution(space, images)
