"""Invariants of graded subspaces of the -1 component.

For H and K this is the nondegenerate even super-skew bilinear form machinery:
profiles (a, b, c, d), canonical bases realizing the block Gram matrix J,
index partitions J1 / J2 / J2bar / J3 with the single/twinned predicates, and
the formal values attached to monomials in the rotated coordinates.  For W
and S the invariant is just the superdimension (k, l).

All variable indices are 0-based; the contact variable of K is excluded
throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exactla import GradedSubspace, left_nullspace, rank_of, rref_rows
from .scalars import DomainError, ParameterError
from .superspace import SPoly

# ----------------------------------------------------------------------
# the bilinear form


def minus_one_variables(L) -> list[int]:
    """Variable index behind each basis slot of the -1 component (H/K)."""
    S = L.space
    out = []
    for item in L._items[-1]:
        alpha, mask = item
        if mask:
            out.append(S.m + mask.bit_length() - 1)
        else:
            out.append(alpha.index(1))
    return out


def _sigma_prime(L, i: int):
    return L._sigma_prime(i)


def beta_form_gram(L) -> np.ndarray:
    """Gram matrix of the canonical form on the -1 component, x-coordinates."""
    if L.family not in ("H", "K"):
        raise ParameterError("the bilinear form lives on H or K")
    got = getattr(L, "_beta_gram", None)
    if got is not None:
        return got
    F = L.F
    d1 = L.dims[-1]
    hamvars = minus_one_variables(L)
    G = np.zeros((d1, d1), dtype=np.int64)
    for a, va in enumerate(hamvars):
        sg, vap = _sigma_prime(L, va)
        for b, vb in enumerate(hamvars):
            if vb != vap:
                continue
            c = F.from_int(sg)
            if L.space.var_parity(va):
                c = F.neg(c)
            G[a, b] = c
    L._beta_gram = G
    return G


def beta_form(L, u, v) -> int:
    """The form evaluated on two -1 elements."""
    uu = u.vec(-1) if hasattr(u, "vec") else np.asarray(u)
    vv = v.vec(-1) if hasattr(v, "vec") else np.asarray(v)
    if hasattr(u, "comps") and set(u.comps) - {-1}:
        raise DomainError("form arguments must live in degree -1")
    if hasattr(v, "comps") and set(v.comps) - {-1}:
        raise DomainError("form arguments must live in degree -1")
    F = L.F
    G = beta_form_gram(L)
    return int(F.mat_mul(F.mat_mul(uu[None, :], G), vv[:, None])[0, 0])


def gram_of_rows(L, rows: np.ndarray) -> np.ndarray:
    F = L.F
    G = beta_form_gram(L)
    return F.mat_mul(F.mat_mul(rows, G), rows.T)


def j_matrix(L, d: int) -> np.ndarray:
    """Block Gram matrix in the rotated ordered basis with q = floor((n-d)/2)."""
    F = L.F
    r = (L.m if L.family == "H" else L.m - 1) // 2
    n = L.n
    q = (n - d) // 2
    dim = 2 * r + n
    J = np.zeros((dim, dim), dtype=np.int64)
    one = 1
    for i in range(r):
        J[i, r + i] = one
        J[r + i, i] = F.neg(one)
    o = 2 * r
    for i in range(q):
        J[o + i, o + q + i] = F.neg(one)
        J[o + q + i, o + i] = F.neg(one)
    for i in range(2 * q, n):
        J[o + i, o + i] = F.neg(one)
    return J


# ----------------------------------------------------------------------
# rotated coordinates


@dataclass
class YSystem:
    """Rotated basis of the -1 component: q hyperbolic odd pairs, anisotropic
    tail, even part untouched."""

    L: object
    d: int
    q: int
    vectors: list  # SPoly per variable index (entry for z is just z)
    dual: np.ndarray  # row i: coefficients of D_i over the partials
    tilde: list[int]

    def var_poly(self, i: int) -> SPoly:
        return self.vectors[i]

    def rows_minus_one(self) -> np.ndarray:
        """Coordinates of the non-contact y's over the -1 local basis."""
        L = self.L
        hamvars = minus_one_variables(L)
        slot = {v: k for k, v in enumerate(hamvars)}
        out = np.zeros((len(hamvars), len(hamvars)), dtype=np.int64)
        for row, i in enumerate(hamvars):
            for mon, c in self.vectors[i].c.items():
                alpha, mask = mon
                var = (
                    L.space.m + mask.bit_length() - 1 if mask else alpha.index(1)
                )
                out[row, slot[var]] = c
        return out


def y_system(L, d: int) -> YSystem:
    if L.family not in ("H", "K"):
        raise ParameterError("rotated coordinates live on H or K")
    if not 0 <= d <= L.n:
        raise ParameterError("anisotropic tail size out of range")
    S = L.space
    F = L.F
    n, m = L.n, L.m
    q = (n - d) // 2
    i_rt2 = F.inv(F.sqrt_two)
    rt_m1 = F.sqrt_minus_one
    vectors: list[SPoly] = []
    dual = np.zeros((S.nvars, S.nvars), dtype=np.int64)
    tilde = list(range(S.nvars))
    r = (m if L.family == "H" else m - 1) // 2
    for i in range(S.nvars):
        if i < m:
            vectors.append(SPoly.mono(S, S.variable(i)))
            dual[i, i] = 1
            if i < r:
                tilde[i] = i + r
            elif i < 2 * r:
                tilde[i] = i - r
            continue
        b = i - m
        if b < q:
            f = SPoly(S)
            f.add_term(S.variable(i), i_rt2)
            f.add_term(S.variable(i + q), F.mul(rt_m1, i_rt2))
            vectors.append(f)
            dual[i, i] = i_rt2
            dual[i, i + q] = F.neg(F.mul(rt_m1, i_rt2))
            tilde[i] = i + q
        elif b < 2 * q:
            f = SPoly(S)
            f.add_term(S.variable(i - q), i_rt2)
            f.add_term(S.variable(i), F.neg(F.mul(rt_m1, i_rt2)))
            vectors.append(f)
            dual[i, i - q] = i_rt2
            dual[i, i] = F.mul(rt_m1, i_rt2)
            tilde[i] = i - q
        else:
            vectors.append(SPoly.mono(S, S.variable(i)))
            dual[i, i] = 1
    return YSystem(L, d, q, vectors, dual, tilde)


def dual_field(L, ys: YSystem, a: SPoly, contact: bool = False):
    """The Hamiltonian (or contact) field written in the rotated frame."""
    from .cartan import ambient_w
    from .superspace import delta, superderive

    S = L.space
    F = L.F
    W = ambient_w(L)
    pa = a.parity() if not a.is_zero() else 0
    terms = []
    for i in L._ham_indices():
        sg, _ = L._sigma_prime(i)
        da = SPoly(S)
        for j in np.nonzero(ys.dual[i])[0]:
            da = da + superderive(int(j), a).scale(int(ys.dual[i, j]))
        if da.is_zero():
            continue
        c = F.from_int(sg)
        if S.var_parity(i) and pa:
            c = F.neg(c)
        it = ys.tilde[i]
        for j in np.nonzero(ys.dual[it])[0]:
            terms.append((da.scale(F.mul(c, int(ys.dual[it, j]))), int(j)))
    if contact:
        z = S.z_index
        dza = superderive(z, a)
        if not dza.is_zero():
            for k in L._ham_indices():
                xk = SPoly.mono(S, S.variable(k))
                terms.append((dza * xk, k))
        da = delta(a)
        if not da.is_zero():
            terms.append((da, z))
    return W.w_field(terms)


def y_monomial_poly(L, ys: YSystem, alpha: tuple[int, ...], mask: int) -> SPoly:
    """Expand a monomial in the rotated variables into the plain basis."""
    S = L.space
    f = SPoly.mono(S, (alpha, 0))
    for b in range(S.n):
        if mask >> b & 1:
            f = f * ys.vectors[S.m + b]
    return f


# ----------------------------------------------------------------------
# profiles


@dataclass(frozen=True, order=True)
class BetaProfile:
    a: int
    b: int
    c: int
    d: int

    def dim(self) -> int:
        return self.a + self.b + self.c + self.d

    def is_nondegenerate(self) -> bool:
        return self.a == self.b and self.c == 0

    def is_isotropic(self) -> bool:
        return self.a == 0 and self.d == 0

    def astuple(self):
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class IndexPartition:
    j1: frozenset
    j2: frozenset
    j2bar: frozenset
    j3: frozenset
    q: int
    j1_single: bool
    j1_twinned: bool
    j3_single: bool
    j3_twinned: bool


def admissible_profiles(L) -> list[BetaProfile]:
    r = (L.m if L.family == "H" else L.m - 1) // 2
    n = L.n
    total = 2 * r + n
    out = []
    for a in range(r + 1):
        for b in range(a, r + 1):
            for d in range(n + 1):
                for c in range(0, (n - d) // 2 + 1):
                    pr = BetaProfile(a, b, c, d)
                    if 0 < pr.dim() < total:
                        out.append(pr)
    return sorted(out)


def index_partition(L, profile: BetaProfile) -> IndexPartition:
    if L.family not in ("H", "K"):
        raise ParameterError("index partitions live on H or K")
    a, b, c, d = profile.astuple()
    m, n = L.m, L.n
    r = (m if L.family == "H" else m - 1) // 2
    q = (n - d) // 2
    i01 = set(range(0, a))
    i01b = set(range(r, r + a))
    i02 = set(range(a, b))
    i02b = set(range(r + a, r + b))
    i11 = set(range(m + n - d, m + n))
    i12 = set(range(m, m + c))
    i12b = set(range(m + q, m + q + c))
    i03 = set(range(b, r)) | set(range(r + b, 2 * r))
    i13 = set(range(m + c, m + q)) | set(range(m + q + c, m + n - d))
    j1 = frozenset(i01 | i01b | i11)
    j2 = frozenset(i02 | i12)
    j2b = frozenset(i02b | i12b)
    j3 = frozenset(i03 | i13)

    def single_twinned(js):
        evens = [i for i in js if i < m]
        odds = [i for i in js if i >= m]
        return (not evens and len(odds) == 1, not evens and len(odds) == 2)

    s1, t1 = single_twinned(j1)
    s3, t3 = single_twinned(j3)
    return IndexPartition(j1, j2, j2b, j3, q, s1, t1, s3, t3)


def nu_value(mon, part: IndexPartition, m: int):
    """None for value zero, else exponents (k, l) of the formal product
    (1/3)^k 2^l; a plain 1 is (0, 0)."""
    alpha, mask = mon
    k = 0
    l = 0
    for i, e in enumerate(alpha):
        if not e:
            continue
        if i in part.j2:
            return None
        if i in part.j2bar:
            k += e
        elif i in part.j3:
            l += e
    b = 0
    ms = mask
    while ms:
        if ms & 1:
            i = m + b
            if i in part.j2:
                return None
            if i in part.j2bar:
                k += 1
            elif i in part.j3:
                l += 1
        ms >>= 1
        b += 1
    return (k, l)


# ----------------------------------------------------------------------
# profile of a subspace, canonical basis, completion


def _split_parity(L, rows: np.ndarray):
    pars = L.parities(-1)
    width = rows.shape[1] if rows.ndim == 2 else L.dims[-1]
    ev, od = [], []
    for row in rows:
        ps = set(int(x) for x in np.unique(pars[np.nonzero(row)[0]]))
        if len(ps) != 1:
            raise DomainError("subspace rows must be parity homogeneous")
        (ev if ps.pop() == 0 else od).append(row)
    return (
        np.array(ev, dtype=np.int64).reshape(len(ev), width),
        np.array(od, dtype=np.int64).reshape(len(od), width),
    )


def beta_profile(L, V) -> BetaProfile:
    """The 4-tuple (a, b, c, d) computed from the ranks of the restricted form."""
    rows = V.rows(-1) if isinstance(V, GradedSubspace) else np.asarray(V)
    if isinstance(V, GradedSubspace) and set(V.degrees()) - {-1}:
        raise DomainError("profile arguments live in degree -1")
    ev, od = _split_parity(L, rows)
    ge = gram_of_rows(L, ev) if ev.size else np.zeros((0, 0), np.int64)
    go = gram_of_rows(L, od) if od.size else np.zeros((0, 0), np.int64)
    re = rank_of(L.F, ge)
    ro = rank_of(L.F, go)
    if re % 2:
        raise DomainError("even rank of an alternating form cannot be odd")
    a = re // 2
    return BetaProfile(a, ev.shape[0] - a, od.shape[0] - ro, ro)


def superdim(L, V) -> tuple[int, int]:
    rows = V.rows(-1) if isinstance(V, GradedSubspace) else np.asarray(V)
    ev, od = _split_parity(L, rows)
    return (ev.shape[0], od.shape[0])


def standard_subspace(L, profile) -> GradedSubspace:
    """The printed standard subspace realizing a profile / superdimension."""
    gs = GradedSubspace(L)
    if L.family in ("W", "S"):
        k, l = profile
        if not (0 <= k <= L.m and 0 <= l <= L.n and 0 < k + l < L.m + L.n):
            raise ParameterError(f"inadmissible superdimension {profile}")
        for i in list(range(k)) + [L.m + j for j in range(l)]:
            v = np.zeros(L.dims[-1], dtype=np.int64)
            v[i] = 1
            gs.insert(-1, v)
        return gs
    if not isinstance(profile, BetaProfile):
        profile = BetaProfile(*profile)
    if profile not in admissible_profiles(L):
        raise ParameterError(f"inadmissible profile {profile}")
    a, b, c, d = profile.astuple()
    m, n = L.m, L.n
    r = (m if L.family == "H" else m - 1) // 2
    ys = y_system(L, d)
    hamvars = minus_one_variables(L)
    slot = {v: k for k, v in enumerate(hamvars)}
    yrows = ys.rows_minus_one()

    def add(var):
        gs.insert(-1, yrows[slot[var]])

    for i in range(a):
        add(i)
        add(r + i)
    for i in range(a, b):
        add(i)
    for i in range(c):
        add(m + i)
    for i in range(d):
        add(m + n - d + i)
    return gs


# -- canonical basis extraction (symplectic / orthogonal Gram-Schmidt) ----


def _solve_particular(F, M: np.ndarray, rhs: np.ndarray):
    """One solution x of x M^T ... precisely: M @ x = rhs, free vars zero."""
    rows, cols = M.shape
    sysm = np.concatenate([M, rhs.reshape(-1, 1)], axis=1)
    mat, piv, nr = rref_rows(F, sysm, cols + 1)
    x = np.zeros(cols, dtype=np.int64)
    for rr in range(nr):
        pc = int(piv[rr])
        if pc == cols:
            return None  # inconsistent
        x[pc] = mat[rr, cols]
    return x


class BetaBasis:
    """Canonical basis of a subspace: even hyperbolic pairs, even radical,
    odd isotropic part, odd anisotropic tail."""

    def __init__(self, pairs_u, pairs_w, radical, iso, aniso):
        self.pairs_u = pairs_u
        self.pairs_w = pairs_w
        self.radical = radical
        self.iso = iso
        self.aniso = aniso

    def profile(self) -> BetaProfile:
        a = len(self.pairs_u)
        return BetaProfile(a, a + len(self.radical), len(self.iso), len(self.aniso))

    def vectors(self):
        return self.pairs_u + self.pairs_w + self.radical + self.iso + self.aniso


def beta_basis(L, V) -> BetaBasis:
    F = L.F
    rows = V.rows(-1) if isinstance(V, GradedSubspace) else np.asarray(V)
    ev, od = _split_parity(L, rows)

    def form(u, w):
        return int(F.mat_mul(F.mat_mul(u[None, :], beta_form_gram(L)), w[:, None])[0, 0])

    pend = [ev[i].copy() for i in range(ev.shape[0])]
    pairs_u, pairs_w, radical = [], [], []
    while pend:
        u = pend.pop(0)
        wi = next((k for k, w in enumerate(pend) if form(u, w)), None)
        if wi is None:
            radical.append(u)
            continue
        w = pend.pop(wi)
        w = F.vscale(F.inv(form(u, w)), w)
        rest = []
        for v in pend:
            v = F.vsub(v, F.vscale(form(v, w), u))
            v = F.vadd(v, F.vscale(form(v, u), w))
            if np.any(v):
                rest.append(v)
        pend = rest
        pairs_u.append(u)
        pairs_w.append(w)
    pend = [od[i].copy() for i in range(od.shape[0])]
    iso, aniso = [], []
    while pend:
        ai = next((k for k, v in enumerate(pend) if form(v, v)), None)
        if ai is None:
            pi = next(
                (
                    (k, j)
                    for k in range(len(pend))
                    for j in range(k + 1, len(pend))
                    if form(pend[k], pend[j])
                ),
                None,
            )
            if pi is None:
                iso = pend
                break
            k, j = pi
            pend[k] = F.vadd(pend[k], pend[j])
            continue
        v = pend.pop(ai)
        nrm = form(v, v)
        lam = F.sqrt(F.mul(F.neg(1), F.inv(nrm)))
        v = F.vscale(lam, v)  # now form(v, v) = -1
        rest = []
        for w in pend:
            w = F.vsub(w, F.vscale(F.neg(form(w, v)), v))
            if np.any(w):
                rest.append(w)
        pend = rest
        aniso.append(v)
    return BetaBasis(pairs_u, pairs_w, radical, iso, aniso)


def complete_beta_basis(L, V) -> tuple[BetaProfile, np.ndarray]:
    """Extend a canonical basis of V to a full basis with Gram matrix J.

    Returns the profile of V and the full matrix whose rows are ordered like
    the printed generalized orthosymplectic basis; the rows belonging to V
    occupy the standard-subspace slots for that profile.
    """
    F = L.F
    G = beta_form_gram(L)
    bb = beta_basis(L, V)
    prof = bb.profile()
    a, b, c, d = prof.astuple()
    m, n = L.m, L.n
    r = (m if L.family == "H" else m - 1) // 2
    q = (n - d) // 2
    d1 = L.dims[-1]
    pars = L.parities(-1)
    evcols = np.nonzero(pars == 0)[0]
    odcols = np.nonzero(pars == 1)[0]

    def form(u, w):
        return int(F.mat_mul(F.mat_mul(u[None, :], G), w[:, None])[0, 0])

    def solve_constraints(current, rhs_vals, parity):
        cols = evcols if parity == 0 else odcols
        if current:
            M = F.mat_mul(np.array(current), G)[:, cols]
        else:
            M = np.zeros((0, len(cols)), np.int64)
        x = _solve_particular(F, M, np.array(rhs_vals, dtype=np.int64))
        if x is None:
            raise DomainError("basis completion failed")
        full = np.zeros(d1, dtype=np.int64)
        full[cols] = x
        return full

    def free_vector(current, parity):
        cols = evcols if parity == 0 else odcols
        if current:
            M = F.mat_mul(np.array(current), G)[:, cols]
        else:
            M = np.zeros((0, len(cols)), np.int64)
        ns = left_nullspace(F, M.T)
        for row in ns:
            full = np.zeros(d1, dtype=np.int64)
            full[cols] = row
            yield full

    # even part: pair the radical, then fresh hyperbolic pairs
    e_first = list(bb.pairs_u) + list(bb.radical)
    e_second = list(bb.pairs_w)
    for i, u in enumerate(bb.radical):
        current = e_first + e_second
        rhs = [0] * len(current)
        rhs[e_first.index(u)] = 1
        w = solve_constraints(current, rhs, 0)
        e_second.append(w)
    while len(e_first) < r:
        current = e_first + e_second
        u = next(
            (v for v in free_vector(current, 0) if np.any(v)), None
        )
        if u is None:
            raise DomainError("basis completion failed in the even part")
        e_first.append(u)
        rhs = [0] * (len(current)) + [1]
        w = solve_constraints(current + [u], rhs, 0)
        e_second.append(w)

    # odd part: duals for the isotropic block, fresh pairs, anisotropic fill
    o_first = list(bb.iso)
    o_second = []
    o_tail = list(bb.aniso)
    inv2 = F.inv(2)
    for i, u in enumerate(bb.iso):
        current = o_first + o_second + o_tail
        rhs = [0] * len(current)
        rhs[o_first.index(u)] = F.neg(1)
        w = solve_constraints(current, rhs, 1)
        w = F.vadd(w, F.vscale(F.mul(form(w, w), inv2), u))  # isotropize
        o_second.append(w)
    while len(o_first) < q:
        current = o_first + o_second + o_tail
        fresh = []
        for v in free_vector(current, 1):
            nrm = form(v, v)
            if nrm == 0:
                for w in fresh:
                    if form(v, w):
                        v = F.vadd(v, w)
                        nrm = form(v, v)
                        break
            if nrm:
                lam = F.sqrt(F.mul(F.neg(1), F.inv(nrm)))
                fresh.append(F.vscale(lam, v))
            else:
                fresh.append(v)  # candidate partner pool
            if len([w for w in fresh if form(w, w)]) == 2:
                break
        an = [w for w in fresh if form(w, w)]
        if len(an) < 2:
            raise DomainError("basis completion failed in the odd part")
        u1, u2 = an[0], an[1]
        u2 = F.vsub(u2, F.vscale(F.neg(form(u2, u1)), u1))
        lam = F.sqrt(F.mul(F.neg(1), F.inv(form(u2, u2))))
        u2 = F.vscale(lam, u2)
        irt2 = F.inv(F.sqrt_two)
        wp = F.vadd(F.vscale(irt2, u1), F.vscale(F.mul(F.sqrt_minus_one, irt2), u2))
        wm = F.vsub(F.vscale(irt2, u1), F.vscale(F.mul(F.sqrt_minus_one, irt2), u2))
        o_first.append(wp)
        o_second.append(wm)
    while len(o_first) + len(o_second) + len(o_tail) < n - d + len(bb.aniso):
        current = o_first + o_second + o_tail
        got = None
        pool = []
        for v in free_vector(current, 1):
            if form(v, v):
                got = v
                break
            pool.append(v)
        if got is None:
            for k in range(len(pool)):
                for j in range(k + 1, len(pool)):
                    if form(pool[k], pool[j]):
                        got = F.vadd(pool[k], pool[j])
                        break
                if got is not None:
                    break
        if got is None:
            raise DomainError("basis completion failed in the anisotropic part")
        lam = F.sqrt(F.mul(F.neg(1), F.inv(form(got, got))))
        o_tail.insert(len(o_tail) - len(bb.aniso), F.vscale(lam, got))
    rows = e_first + e_second + o_first + o_second + o_tail
    C = np.array(rows, dtype=np.int64)
    JC = gram_of_rows(L, C)
    if not np.array_equal(JC, j_matrix(L, d)):
        raise DomainError("completion does not realize the block Gram matrix")
    return prof, C


def perp(L, V) -> GradedSubspace:
    """{u : beta(u, V) = 0} as a graded subspace of the -1 component."""
    F = L.F
    rows = V.rows(-1)
    G = beta_form_gram(L)
    M = F.mat_mul(G, rows.T)
    ns = left_nullspace(F, M)
    gs = GradedSubspace(L)
    for row in ns:
        gs.insert(-1, row)
    return gs


# ----------------------------------------------------------------------
# family enumerators


def enumerate_profiles(L, selector: str) -> list:
    """Profiles of the requested family, in deterministic order.

    Selectors: ``all`` (nontrivial proper), ``script-v`` (J3 neither single
    nor twinned), ``script-w`` (J3 not twinned, K only), ``r-nondegenerate``,
    ``r-isotropic`` and ``r-degenerate`` (the three reducible-action
    families).
    """
    if L.family in ("W", "S"):
        if selector != "all":
            raise ParameterError("W/S admit only the plain enumeration")
        out = []
        for k in range(L.m + 1):
            for l in range(L.n + 1):
                if 0 < k + l < L.m + L.n:
                    out.append((k, l))
        return out
    out = []
    for pr in admissible_profiles(L):
        part = index_partition(L, pr)
        if selector == "all":
            keep = True
        elif selector == "script-v":
            keep = not part.j3_single and not part.j3_twinned
        elif selector == "script-w":
            if L.family != "K":
                raise ParameterError("script-w is a K-family selector")
            keep = not part.j3_twinned
        elif selector == "r-nondegenerate":
            keep = pr.is_nondegenerate() and not part.j1_twinned and not part.j3_twinned
        elif selector == "r-isotropic":
            keep = pr.is_isotropic() and not part.j3_twinned
        elif selector == "r-degenerate":
            keep = (not pr.is_nondegenerate()) and not part.j3 and not part.j1_twinned
        else:
            raise ParameterError(f"unknown selector {selector!r}")
        if keep:
            out.append(pr)
    return out
