"""Constructors for the maximal graded subalgebra families, their recursive
descent subspaces, and exact evaluators of the printed closed forms.

Grouped by the degree conditions:

* type I: full -1 and 0 components (divergence-kernel chains, Euler lines,
  z-free chains and z-tails);
* type II: a proper -1 component V, grown by the descent recursion m(V)
  (or its two-constraint contact variant);
* type III-R: full -1 component with a reducible proper null, grown from the
  degree-zero stabilizer of a proper V.

Formula values are evaluated exactly and compared to the constructed
dimensions by the callers; disagreements are reported, never patched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cartan import AlgebraElement, bracket, derived_span, euler_field
from .exactla import GradedSubspace, bracket_closure, solve_ad_constraint
from .flags import (
    BetaProfile,
    beta_profile,
    enumerate_profiles,
    index_partition,
    nu_value,
    standard_subspace,
    y_monomial_poly,
    y_system,
)
from .scalars import DomainError, ParameterError
from .superspace import SPoly


@dataclass
class MgsDescriptor:
    family: str
    p: int
    m: int
    n: int
    mgs_type: str  # 'I' | 'II' | 'III-R' | 'III-S'
    variant: str
    profile: tuple | None
    subspace: GradedSubspace
    dim: int
    formula_dim: int | None = None
    matches: bool | None = None
    notes: dict = field(default_factory=dict)

    def finish(self):
        self.dim = self.subspace.dim()
        if self.formula_dim is not None:
            self.matches = self.dim == self.formula_dim
        return self


def _descriptor(L, mgs_type, variant, profile, subspace, formula_dim=None, **notes):
    return MgsDescriptor(
        L.family, L.p, L.m, L.n, mgs_type, variant, profile, subspace,
        subspace.dim(), formula_dim, None, dict(notes),
    ).finish()


# ----------------------------------------------------------------------
# closed forms


def _exact_div(num: int, den: int) -> int:
    if num % den:
        raise DomainError(f"closed form is not an integer: {num}/{den}")
    return num // den


def formula_dimension(selector: str, family: str, p: int, m: int, n: int,
                      profile=None, j3_single: bool | None = None,
                      j3_empty: bool | None = None) -> int:
    """Exact value of the printed dimension formula for one branch."""
    r = (m if family == "H" else m - 1) // 2 if family in ("H", "K") else None
    if selector == "type1":
        if family == "W":
            if profile == "kernel-chain":
                return (m + n - 1) * 2**n * p**m + 2
            if profile == "euler-line":
                return (m + n) * (m + n + 2)
        if family == "S":
            if (m - n + 1) % p == 0:
                return (m + n) ** 2 + 2 * (m + n) - 1
            return (m + n) ** 2 + (m + n) - 1
        if family == "H":
            return (m + n) ** 2 + m
        if family == "K":
            if profile == "z-free-chain":
                return 2**n * p ** (2 * r) + 1
            if profile == "z-tail":
                return (2 * r + n) ** 2 + 4 * r + n + 3
    if selector == "type2":
        if family == "W":
            k, l = profile
            return 2**n * p**m * (m + n) - 2**l * p**k * (m + n - k - l)
        if family == "S":
            k, l = profile
            return 2**n * p**m * (m + n - 1) + 1 - 2**l * p**k * (m + n - k - l)
        if family == "H":
            a, b, c, d = profile
            return (
                p**m * 2**n
                + p ** (2 * a) * 2**d
                - p ** (a + b) * 2 ** (c + d) * (m - 2 * b + n - d - 2 * c + 1)
                - 2
            )
        if family == "K":
            a, b, c, d = profile
            delta = 1 if (n - m - 3) % p == 0 else 0
            nondeg = a == b and c == 0
            isotropic = a == 0 and d == 0
            if isotropic:
                return p**m * 2**n - p**b * 2**c * (m - 2 * b + n - 2 * c) - delta
            if nondeg and j3_single:
                return p**m * 2**n - (2 * r - 2 * a + n - d) * p ** (2 * a + 1) * 2**d - p
            return (
                p**m * 2**n
                + p ** (2 * a + 1) * 2**d
                - p ** (a + b + 1) * 2 ** (c + d) * (m - 2 * b + n - d - 2 * c)
                - delta
            )
    if selector == "type2-contact-pair":
        a, b, c, d = profile
        delta = 1 if (n - m - 3) % p == 0 else 0
        return p**m * 2**n - p ** (b + 1) * 2**c * (m - 2 * b + n - 2 * c) + p - delta
    if selector == "type3r":
        if family == "W":
            k, l = profile
            return 2 ** (n - l) * p ** (m - k) * (m + n - k - l) + 2**n * p**m * (k + l)
        if family == "S":
            k, l = profile
            return (
                2 ** (n - l) * p ** (m - k) * (m + n)
                + 2**n * p**m * (k + l - 1)
                - k
                - 1
            )
        if family == "H":
            a, b, c, d = profile
            if a == b and c == 0:
                return p ** (2 * a) * 2**d + p ** (2 * (r - a)) * 2 ** (n - d) - 2
            return p ** (m - b) * 2 ** (n - c) + (b + c) * p**b * 2**c - 1
        if family == "K":
            a, b, c, d = profile
            if j3_empty:
                return p ** (b + 1) * 2**c * (b + c + 1)
            return p**b * 2**c * (p ** (m - 2 * b) * 2 ** (n - 2 * c) + b + c)
    raise ParameterError(f"unknown formula selector {selector}/{family}/{profile}")


def formula_class_count(selector: str, family: str, m: int, n: int) -> int:
    r = (m if family == "H" else m - 1) // 2 if family in ("H", "K") else None
    if selector == "type2":
        if family in ("W", "S"):
            return (m + 1) * (n + 1) - 2
        if family == "H":
            if n % 2:
                return _exact_div((r + 1) * (r * (n + 2) ** 2 + 2 * n**2 + 6 - r), 8) - 2
            return _exact_div((r + 1) * (r * (n + 2) ** 2 + 2 * n**2 + 8), 8) - 2
        if family == "K":
            if n % 2:
                return (
                    _exact_div((r + 1) * (r * (n + 2) ** 2 + 2 * n**2 + 4 * n + 2 - r), 8)
                    + r
                    - 1
                )
            return (
                _exact_div((r + 1) * (r * (n + 2) ** 2 + 2 * n**2 + 4 * n + 8), 8)
                + r
                - 2
            )
    if selector == "type3r":
        if family in ("W", "S"):
            return (m + 1) * (n + 1) - 2
        if family == "H":
            if n % 2 == 0:
                return _exact_div(n * r + 3 * n + 2 * r - 2, 2) + (r // 2) * (n + 1)
            return _exact_div(n * r + 3 * n + r - 1, 2) + (r // 2) * (n + 1)
        if family == "K":
            if n % 2 == 0:
                return _exact_div(r * n + n + 2 * r - 2, 2)
            return _exact_div(r * n + n + r - 1, 2)
    raise ParameterError(f"unknown count selector {selector}/{family}")


# ----------------------------------------------------------------------
# type I


def _zfree_rows(L, deg: int) -> np.ndarray:
    z = L.space.z_index
    rows = []
    for k, mon in enumerate(L._items[deg]):
        if mon[0][z] == 0:
            v = L.zero_vec(deg)
            v[k] = 1
            rows.append(v)
    return np.array(rows, dtype=np.int64).reshape(len(rows), L.dims[deg])


def _zpower_rows(L, deg: int, power: int) -> np.ndarray:
    z = L.space.z_index
    rows = []
    for k, mon in enumerate(L._items[deg]):
        if mon[0][z] == power:
            v = L.zero_vec(deg)
            v[k] = 1
            rows.append(v)
    return np.array(rows, dtype=np.int64).reshape(len(rows), L.dims[deg])


def euler_multiple_rows(L, deg: int) -> np.ndarray:
    """Rows of {f * degree-derivation : f of the given degree} in W or S."""
    amb = L if L.family == "W" else L.ambient
    S = L.space
    rows = []
    for mon in S.basis_by_degree().get(deg, []):
        e = euler_field(amb, SPoly.mono(S, mon))
        if e.is_zero():
            continue
        if L.family == "S":
            e = L.from_ambient(e)
        rows.append(e.vec(deg))
    return np.array(rows, dtype=np.int64).reshape(len(rows), L.dims[deg])


def div_kernel_rows(L, deg: int) -> np.ndarray:
    """The W-family divergence kernel is exactly the S realization rows."""
    from .exactla import left_nullspace

    S = L.space
    F = L.F
    items = L._items[deg]
    by_deg = S.basis_by_degree()
    tgt = {mon: k for k, mon in enumerate(by_deg.get(deg, []))}
    if not tgt:
        return np.eye(L.dims[deg], dtype=np.int64)
    div_mat = np.zeros((len(items), len(tgt)), dtype=np.int64)
    for a, (mon, i) in enumerate(items):
        r = S.mono_derive(i, mon)
        if r is None:
            continue
        c = F.from_int(r[0])
        if S.var_parity(i) and S.parity(mon):
            c = F.neg(c)
        div_mat[a, tgt[r[1]]] = c
    return left_nullspace(F, div_mat)


def type1_subalgebras(L) -> list[MgsDescriptor]:
    out = []
    p, m, n = L.p, L.m, L.n
    if L.family == "W":
        gs = GradedSubspace(L)
        gs.insert_full_component(-1)
        gs.insert_full_component(0)
        for deg in range(1, L.top() + 1):
            ker = div_kernel_rows(L, deg)
            if ker.shape[0]:
                gs.insert_batch(deg, ker)
        out.append(
            _descriptor(
                L, "I", "kernel-chain", "kernel-chain", gs,
                formula_dimension("type1", "W", p, m, n, "kernel-chain"),
            )
        )
        if (m - n + 1) % p != 0:
            gs2 = GradedSubspace(L)
            gs2.insert_full_component(-1)
            gs2.insert_full_component(0)
            gs2.insert_batch(1, euler_multiple_rows(L, 1))
            out.append(
                _descriptor(
                    L, "I", "euler-line", "euler-line", gs2,
                    formula_dimension("type1", "W", p, m, n, "euler-line"),
                )
            )
    elif L.family == "S":
        gs = GradedSubspace(L)
        gs.insert_full_component(-1)
        gs.insert_full_component(0)
        variant = "low-degrees"
        if (m - n + 1) % p == 0:
            gs.insert_batch(1, euler_multiple_rows(L, 1))
            variant = "low-degrees-plus-euler"
        out.append(
            _descriptor(
                L, "I", variant, variant, gs, formula_dimension("type1", "S", p, m, n)
            )
        )
    elif L.family == "H":
        gs = GradedSubspace(L)
        gs.insert_full_component(-1)
        gs.insert_full_component(0)
        out.append(
            _descriptor(
                L, "I", "low-degrees", "low-degrees", gs,
                formula_dimension("type1", "H", p, m, n),
            )
        )
    else:
        gs = GradedSubspace(L)
        for deg in (-2, -1, 0):
            gs.insert_full_component(deg)
        for deg in range(1, L.top() + 1):
            rows = _zfree_rows(L, deg)
            if rows.shape[0]:
                gs.insert_batch(deg, rows)
        out.append(
            _descriptor(
                L, "I", "z-free-chain", "z-free-chain", gs,
                formula_dimension("type1", "K", p, m, n, "z-free-chain"),
            )
        )
        gs2 = GradedSubspace(L)
        for deg in (-2, -1, 0):
            gs2.insert_full_component(deg)
        gs2.insert_batch(1, _zpower_rows(L, 1, 1))
        gs2.insert_batch(2, _zpower_rows(L, 2, 2))
        out.append(
            _descriptor(
                L, "I", "z-tail", "z-tail", gs2,
                formula_dimension("type1", "K", p, m, n, "z-tail"),
            )
        )
    return out


# ----------------------------------------------------------------------
# type II: the descent recursion


def _check_proper_minus_one(L, V: GradedSubspace):
    if set(V.degrees()) - {-1}:
        raise DomainError("V must live in degree -1")
    d = V.dim(-1)
    if not 0 < d < L.dims[-1]:
        raise DomainError("V must be a nontrivial proper subspace")


def m_of_v(L, V: GradedSubspace, profile=None) -> MgsDescriptor:
    """The descent subalgebra of a proper -1 subspace."""
    _check_proper_minus_one(L, V)
    gens = V.element_rows(-1)
    gs = GradedSubspace(L)
    if -2 in L.dims:
        for a in gens:
            for b in gens:
                w = bracket(L, a, b)
                if not w.is_zero():
                    gs.insert(-2, w.vec(-2))
    for row in V.rows(-1):
        gs.insert(-1, row)
    for i in range(0, L.top() + 1):
        rows = solve_ad_constraint(L, i, gens, gs)
        if rows.shape[0]:
            gs.insert_batch(i, rows)
    prof = tuple(profile) if profile is not None else None
    return _descriptor(L, "II", "descent", prof, gs)


def mk1_of_v(L, V: GradedSubspace, profile=None) -> MgsDescriptor:
    """The contact two-constraint variant for isotropic V: the -2 component
    is the whole line of constants and descent also controls the constant
    bracket."""
    if L.family != "K":
        raise ParameterError("the two-constraint descent is a K construction")
    _check_proper_minus_one(L, V)
    pr = beta_profile(L, V)
    if not pr.is_isotropic():
        raise DomainError("the two-constraint descent needs isotropic V")
    gens = V.element_rows(-1)
    one = L.basis_element(-2, 0)
    gs = GradedSubspace(L)
    gs.insert_full_component(-2)
    for row in V.rows(-1):
        gs.insert(-1, row)
    for i in range(0, L.top() + 1):
        rows = solve_ad_constraint(L, i, gens, gs, extra=(one, gs))
        if rows.shape[0]:
            gs.insert_batch(i, rows)
    prof = tuple(profile) if profile is not None else pr.astuple()
    return _descriptor(L, "II", "contact-pair-descent", prof, gs)


def _w_printed_m0_rows(L, k: int, l: int):
    S = L.space
    I_kl = list(range(k)) + [L.m + j for j in range(l)]
    I_bar = [i for i in range(S.nvars) if i not in I_kl]
    amb = L if L.family == "W" else L.ambient
    elts = []
    if L.family == "W":
        for i in I_kl:
            for j in I_kl:
                elts.append(amb.from_poly(SPoly.mono(S, S.variable(i)), j))
        for i in I_bar:
            for j in range(S.nvars):
                elts.append(amb.from_poly(SPoly.mono(S, S.variable(i)), j))
    else:
        for i in I_kl:
            for j in I_kl:
                if i != j:
                    elts.append(amb.from_poly(SPoly.mono(S, S.variable(i)), j))
        for i in I_bar:
            for j in range(S.nvars):
                if i != j:
                    elts.append(amb.from_poly(SPoly.mono(S, S.variable(i)), j))
        x00 = amb.from_poly(SPoly.mono(S, S.variable(0)), 0)
        for i in range(1, S.nvars):
            sgn = L.F.from_int(-1 if S.var_parity(i) == 0 else 1)
            xi = amb.from_poly(SPoly.mono(S, S.variable(i)), i).scale(sgn)
            elts.append(x00 + xi)
    rows = GradedSubspace(L)
    for e in elts:
        if L.family == "S":
            e = L.from_ambient(e)
        if not e.is_zero():
            rows.insert(0, e.vec(0))
    return rows


def nu_span(L, profile: BetaProfile, allowed, degree: int | None = None) -> GradedSubspace:
    """Span of rotated-coordinate monomials filtered by their formal value.

    ``allowed`` is a predicate on the exponent pair (k, l) or on None (the
    value zero).  Enumerates z-free monomials for K.
    """
    part = index_partition(L, profile)

    def pred(mon):
        return allowed(nu_value(mon, part, L.space.m))

    return _y_monomial_span(L, profile, pred, degree=degree)


def descent_allowed(v):
    # zero, one, or at least two factors of the doubling class
    return v is None or v == (0, 0) or v[1] >= 2


def m0_of_v(L, V: GradedSubspace, profile=None) -> tuple[GradedSubspace, GradedSubspace | None]:
    """Degree-zero descent space, with the printed basis span for comparison.

    Returns (recursion result, printed span or None when no printed form
    exists for the family/profile).
    """
    gens = V.element_rows(-1)
    prev = GradedSubspace(L)
    for row in V.rows(-1):
        prev.insert(-1, row)
    rows = solve_ad_constraint(L, 0, gens, prev)
    rec = GradedSubspace(L)
    if rows.shape[0]:
        rec.insert_batch(0, rows)
    printed = None
    if L.family in ("W", "S") and profile is not None:
        printed = _w_printed_m0_rows(L, *profile)
    elif L.family in ("H", "K"):
        pr = profile if isinstance(profile, BetaProfile) else beta_profile(L, V)
        printed = nu_span(L, pr, descent_allowed, degree=0)
        if L.family == "K":
            z = L.space.z_index
            zvec = L.zero_vec(0)
            for kk, mon in enumerate(L._items[0]):
                if mon[0][z] == 1:
                    zvec[kk] = 1
            printed.insert(0, zvec)
    return rec, printed


def enumerate_type2(L) -> list[MgsDescriptor]:
    """All type-II constructions with formula values and match flags."""
    out: list[MgsDescriptor] = []
    p, m, n = L.p, L.m, L.n
    if L.family in ("W", "S"):
        for k, l in enumerate_profiles(L, "all"):
            V = standard_subspace(L, (k, l))
            d = m_of_v(L, V, profile=(k, l))
            d.formula_dim = formula_dimension("type2", L.family, p, m, n, (k, l))
            d.finish()
            out.append(d)
        return _dedupe(out)
    if L.family == "H":
        for pr in enumerate_profiles(L, "script-v"):
            V = standard_subspace(L, pr)
            d = m_of_v(L, V, profile=pr.astuple())
            d.formula_dim = formula_dimension("type2", "H", p, m, n, pr.astuple())
            d.finish()
            out.append(d)
        return _dedupe(out)
    sv = enumerate_profiles(L, "script-v")
    sw = enumerate_profiles(L, "script-w")
    for pr in sv:
        if not pr.is_nondegenerate() and not pr.is_isotropic():
            V = standard_subspace(L, pr)
            d = m_of_v(L, V, profile=pr.astuple())
            part = index_partition(L, pr)
            d.formula_dim = formula_dimension(
                "type2", "K", p, m, n, pr.astuple(), j3_single=part.j3_single
            )
            d.finish()
            out.append(d)
    for pr in sw:
        if pr.is_nondegenerate() or pr.is_isotropic():
            V = standard_subspace(L, pr)
            d = m_of_v(L, V, profile=pr.astuple())
            part = index_partition(L, pr)
            d.formula_dim = formula_dimension(
                "type2", "K", p, m, n, pr.astuple(), j3_single=part.j3_single
            )
            d.finish()
            out.append(d)
    for pr in sv:
        if pr.is_isotropic():
            V = standard_subspace(L, pr)
            d = mk1_of_v(L, V, profile=pr.astuple())
            d.formula_dim = formula_dimension(
                "type2-contact-pair", "K", p, m, n, pr.astuple()
            )
            d.finish()
            out.append(d)
    return _dedupe(out)


def _dedupe(descs: list[MgsDescriptor]) -> list[MgsDescriptor]:
    out = []
    for d in descs:
        if not any(d.subspace == e.subspace for e in out):
            out.append(d)
    return out


# ----------------------------------------------------------------------
# type III-R


def is_subalgebra_component(L, rows: np.ndarray, deg: int) -> bool:
    from .exactla import ad_matrix

    gs = GradedSubspace(L)
    if rows.shape[0]:
        gs.insert_batch(deg, rows)
    if 2 * deg not in L.dims:
        return True
    for row in gs.rows(deg):
        M = ad_matrix(L, deg, row, deg)
        out = L.F.mat_mul(gs.rows(deg), M)
        if np.any(gs.residual_rows(2 * deg, out)):
            return False
    return True


def m_of_g0(L, g0: GradedSubspace, profile=None, variant="reducible-null") -> MgsDescriptor:
    """Full negative part, the given null, and the induced descent above it."""
    if set(g0.degrees()) - {0}:
        raise DomainError("the null seed must live in degree 0")
    if not 0 < g0.dim(0) < L.dims[0]:
        raise DomainError("the null seed must be proper and nontrivial")
    if not is_subalgebra_component(L, g0.rows(0), 0):
        raise DomainError("the null seed is not a subalgebra")
    gs = GradedSubspace(L)
    for deg in L.dims:
        if deg < 0:
            gs.insert_full_component(deg)
    gs.insert_batch(0, g0.rows(0))
    gens = [
        L.basis_element(-1, k) for k in range(L.dims[-1])
    ]
    for i in range(1, L.top() + 1):
        rows = solve_ad_constraint(L, i, gens, gs)
        if rows.shape[0]:
            gs.insert_batch(i, rows)
    prof = tuple(profile) if profile is not None else None
    return _descriptor(L, "III-R", variant, prof, gs)


def enumerate_type3r(L) -> list[MgsDescriptor]:
    out: list[MgsDescriptor] = []
    p, m, n = L.p, L.m, L.n
    if L.family in ("W", "S"):
        for k, l in enumerate_profiles(L, "all"):
            V = standard_subspace(L, (k, l))
            g0, _ = m0_of_v(L, V, profile=(k, l))
            d = m_of_g0(L, g0, profile=(k, l))
            d.formula_dim = formula_dimension("type3r", L.family, p, m, n, (k, l))
            d.finish()
            out.append(d)
        return _dedupe(out)
    selectors = ["r-nondegenerate", "r-isotropic"] if L.family == "H" else ["r-isotropic"]
    for sel in selectors:
        for pr in enumerate_profiles(L, sel):
            V = standard_subspace(L, pr)
            g0, _ = m0_of_v(L, V, profile=pr)
            part = index_partition(L, pr)
            d = m_of_g0(L, g0, profile=pr.astuple(), variant=f"{sel}")
            d.formula_dim = formula_dimension(
                "type3r", L.family, p, m, n, pr.astuple(), j3_empty=not part.j3
            )
            d.finish()
            out.append(d)
    return _dedupe(out)


# ----------------------------------------------------------------------
# span sets for the reducible-null identities


def oX_span(L, profile: BetaProfile, xset: frozenset) -> GradedSubspace:
    """Monomials with every factor drawn from one index block."""
    xs = set(xset)

    def pred(mon):
        alpha, mask = mon
        for i, e in enumerate(alpha):
            if e and i not in xs:
                return False
        b = 0
        ms = mask
        while ms:
            if ms & 1 and (L.space.m + b) not in xs:
                return False
            ms >>= 1
            b += 1
        return True

    return _y_monomial_span(L, profile, pred)


def _y_monomial_span(L, profile: BetaProfile, pred, degree: int | None = None) -> GradedSubspace:
    ys = y_system(L, profile.d)
    S = L.space
    z = S.z_index
    gs = GradedSubspace(L)
    for d, mons in S.basis_by_degree().items():
        if d == 0 or d - 2 not in L.dims:
            continue
        if degree is not None and d - 2 != degree:
            continue
        for alpha, mask in mons:
            if z is not None and alpha[z]:
                continue
            if not pred((alpha, mask)):
                continue
            f = y_monomial_poly(L, ys, alpha, mask)
            comps = L.poly_to_comps(f)
            if comps:
                (dd, vec), = comps.items()
                gs.insert(dd, vec)
    return gs


def reducible_null_span(L, profile: BetaProfile) -> GradedSubspace:
    """The printed value of the full type-III-R subalgebra over one profile.

    Nondegenerate: pure monomials in the J1 block plus pure monomials in the
    J3 block.  Isotropic: monomials in J2+J3 plus (J2 monomials, constant
    allowed) times a single J2bar variable.
    """
    part = index_partition(L, profile)
    m = L.space.m

    def classify(i):
        if i in part.j1:
            return "1"
        if i in part.j2:
            return "2"
        if i in part.j2bar:
            return "2b"
        return "3"

    if profile.is_nondegenerate():
        def pred(mon):
            alpha, mask = mon
            kinds = set()
            for i, e in enumerate(alpha):
                if e:
                    kinds.add(classify(i))
            b = 0
            ms = mask
            while ms:
                if ms & 1:
                    kinds.add(classify(m + b))
                ms >>= 1
                b += 1
            return kinds == {"1"} or kinds == {"3"}
    elif profile.is_isotropic():
        def pred(mon):
            alpha, mask = mon
            n2b = 0
            ok = True
            for i, e in enumerate(alpha):
                if not e:
                    continue
                k = classify(i)
                if k == "2b":
                    n2b += e
                elif k == "1":
                    ok = False
            b = 0
            ms = mask
            while ms:
                if ms & 1:
                    k = classify(m + b)
                    if k == "2b":
                        n2b += 1
                    elif k == "1":
                        ok = False
                ms >>= 1
                b += 1
            if not ok:
                return False
            if n2b == 0:
                return True  # all factors in J2 or J3
            if n2b > 1:
                return False
            # exactly one J2bar factor: the rest must be J2 only
            for i, e in enumerate(alpha):
                if e and classify(i) == "3":
                    return False
            b = 0
            ms = mask
            while ms:
                if ms & 1 and classify(m + b) == "3":
                    return False
                ms >>= 1
                b += 1
            return True
    else:
        raise ParameterError("printed span exists for nondegenerate or isotropic V")
    return _y_monomial_span(L, profile, pred)


# ----------------------------------------------------------------------
# type III-S criteria


def type3s_criterion(L, g0: GradedSubspace):
    """Evaluate the irreducible-null maximality criterion for a user null.

    Returns (criterion_bool, descent_descriptor).  The criterion is:
    W: the degree-1 descent has nonzero divergence; S/H: the degree-1 descent
    is nonzero; K: some degree-1 descent element has nonzero bracket with the
    constant line.
    """
    from .cartan import divergence

    d = m_of_g0(L, g0, variant="irreducible-null")
    rows1 = d.subspace.rows(1) if 1 in L.dims else np.zeros((0, 0))
    if L.family == "W":
        crit = False
        for row in rows1:
            if not divergence(L, AlgebraElement(L, {1: row.copy()})).is_zero():
                crit = True
                break
    elif L.family in ("S", "H"):
        crit = rows1.shape[0] > 0
    else:
        one = L.basis_element(-2, 0)
        crit = False
        for row in rows1:
            if not bracket(L, one, AlgebraElement(L, {1: row.copy()})).is_zero():
                crit = True
                break
    return crit, d


def orthosymplectic_null(L) -> GradedSubspace:
    """Degree-zero elements acting by form-preserving maps on the -1
    component; an irreducible proper subalgebra of the null for testing the
    irreducible-null criteria."""
    from .flags import beta_form_gram

    F = L.F
    if L.family in ("H", "K"):
        G = beta_form_gram(L)
    else:
        # borrow the block layout: needs even m
        if L.m % 2:
            raise ParameterError("even m required for the borrowed form")
        d1 = L.dims[-1]
        r = L.m // 2
        G = np.zeros((d1, d1), dtype=np.int64)
        for i in range(r):
            G[i, r + i] = 1
            G[r + i, i] = F.neg(1)
        for i in range(L.m, d1):
            G[i, i] = F.neg(1)
    d1 = L.dims[-1]
    pars = L.parities(-1)
    d0 = L.dims[0]
    rows = []
    for kk in range(d0):
        u = L.basis_element(0, kk)
        rowsu = []
        for b in range(d1):
            eb = L.basis_element(-1, b)
            rowsu.append(bracket(L, u, eb).vec(-1))
        rows.append(np.concatenate(rowsu))
    act = np.array(rows, dtype=np.int64)  # action matrices, flattened
    # condition: beta([u,v],w) + (-1)^{|u||v|} beta(v,[u,w]) = 0 for all v,w
    pars0 = L.parities(0)
    cons = []
    for b in range(d1):
        for c in range(d1):
            col = []
            for kk in range(d0):
                Mu = act[kk].reshape(d1, d1)
                t1 = int(F.mat_mul(Mu[b][None, :], G[:, c][:, None])[0, 0])
                t2 = int(F.mat_mul(G[b][None, :], Mu[c][:, None])[0, 0])
                if pars0[kk] and pars[b]:
                    t2 = F.neg(t2)
                col.append(F.add(t1, t2))
            cons.append(col)
    C = np.array(cons, dtype=np.int64).T
    from .exactla import left_nullspace

    ns = left_nullspace(F, C)
    gs = GradedSubspace(L)
    for row in ns:
        gs.insert(0, row)
    return gs
