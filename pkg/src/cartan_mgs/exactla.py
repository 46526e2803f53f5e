"""Exact linear algebra over the field: echelonized graded subspaces,
constraint solving for the recursive subalgebra constructions, and bracket
closure by a worklist fixpoint."""

from __future__ import annotations

import numpy as np

from . import kernels
from .scalars import DomainError, Field


def rref_rows(F: Field, rows: np.ndarray, width: int):
    """Canonical reduced row echelon form of the given rows."""
    cap = min(rows.shape[0], width) + 1
    mat = np.zeros((max(cap, 1), width), dtype=np.int64)
    piv = np.zeros(max(cap, 1), dtype=np.int64)
    nr = kernels.rref_insert_batch(
        mat, piv, 0, np.array(rows, dtype=np.int64, copy=True), F.p, F.eps, F.inv_table()
    )
    return mat, piv, nr


def left_nullspace(F: Field, C: np.ndarray) -> np.ndarray:
    """Canonical basis (as rows) of  {x : x C = 0}."""
    nr_rows, w = C.shape
    aug = np.concatenate([C, np.eye(nr_rows, dtype=np.int64)], axis=1)
    mat, piv, nr = rref_rows(F, aug, w + nr_rows)
    null_rows = [mat[r, w:] for r in range(nr) if piv[r] >= w]
    if not null_rows:
        return np.zeros((0, nr_rows), dtype=np.int64)
    mat2, _, nr2 = rref_rows(F, np.array(null_rows), nr_rows)
    return mat2[:nr2].copy()


def rank_of(F: Field, C: np.ndarray) -> int:
    if C.size == 0:
        return 0
    _, _, nr = rref_rows(F, C, C.shape[1])
    return nr


class GradedSubspace:
    """Per-degree reduced-row-echelon bases inside one algebra.

    Membership, dimension and equality are exact; the echelon form is
    canonical so equal subspaces compare equal entrywise.
    """

    def __init__(self, L):
        self.L = L
        self.F: Field = L.F
        self._mat: dict[int, np.ndarray] = {}
        self._piv: dict[int, np.ndarray] = {}
        self._nr: dict[int, int] = {}

    # -- bookkeeping ------------------------------------------------------

    def _ensure(self, deg: int):
        if deg not in self._mat:
            d = self.L.dims[deg]
            self._mat[deg] = np.zeros((d, d), dtype=np.int64)
            self._piv[deg] = np.zeros(d, dtype=np.int64)
            self._nr[deg] = 0

    def degrees(self) -> list[int]:
        return sorted(d for d, n in self._nr.items() if n)

    def dim(self, deg: int | None = None) -> int:
        if deg is None:
            return sum(self._nr.values())
        return self._nr.get(deg, 0)

    def dims(self) -> dict[int, int]:
        return {d: n for d, n in sorted(self._nr.items()) if n}

    def raw(self, deg: int):
        self._ensure(deg)
        return self._mat[deg], self._piv[deg], self._nr[deg]

    def rows(self, deg: int) -> np.ndarray:
        self._ensure(deg)
        return self._mat[deg][: self._nr[deg]]

    def copy(self) -> "GradedSubspace":
        out = GradedSubspace(self.L)
        for d in self._mat:
            out._mat[d] = self._mat[d].copy()
            out._piv[d] = self._piv[d].copy()
            out._nr[d] = self._nr[d]
        return out

    def __eq__(self, other):
        if not isinstance(other, GradedSubspace) or other.L is not self.L:
            return NotImplemented
        if self.dims() != other.dims():
            return False
        return all(np.array_equal(self.rows(d), other.rows(d)) for d in self.degrees())

    # -- insertion and membership -----------------------------------------

    def insert(self, deg: int, vec: np.ndarray) -> bool:
        """Insert one homogeneous vector; returns whether the dimension grew."""
        if deg not in self.L.dims:
            raise DomainError(f"degree {deg} out of range")
        self._ensure(deg)
        before = self._nr[deg]
        self._nr[deg] = kernels.rref_insert_batch(
            self._mat[deg], self._piv[deg], before,
            np.array(vec, dtype=np.int64, copy=True).reshape(1, -1),
            self.F.p, self.F.eps, self.F.inv_table(),
        )
        return self._nr[deg] > before

    def insert_batch(self, deg: int, rows: np.ndarray) -> list[np.ndarray]:
        """Insert many rows; returns the new canonical rows that were added."""
        if rows.size == 0:
            return []
        self._ensure(deg)
        before_piv = set(self._piv[deg][: self._nr[deg]].tolist())
        self._nr[deg] = kernels.rref_insert_batch(
            self._mat[deg], self._piv[deg], self._nr[deg],
            np.array(rows, dtype=np.int64, copy=True),
            self.F.p, self.F.eps, self.F.inv_table(),
        )
        out = []
        mat, piv, nr = self._mat[deg], self._piv[deg], self._nr[deg]
        for r in range(nr):
            if piv[r] not in before_piv:
                out.append(mat[r].copy())
        return out

    def insert_full_component(self, deg: int):
        self._ensure(deg)
        d = self.L.dims[deg]
        self._mat[deg][:d] = np.eye(d, dtype=np.int64)
        self._piv[deg][:d] = np.arange(d)
        self._nr[deg] = d

    def residual(self, deg: int, vec: np.ndarray) -> np.ndarray:
        if self._nr.get(deg, 0) == 0:
            return np.array(vec, dtype=np.int64, copy=True)
        mat, piv, nr = self._mat[deg], self._piv[deg], self._nr[deg]
        coeff = vec[piv[:nr]]
        if not np.any(coeff):
            return np.array(vec, dtype=np.int64, copy=True)
        return self.F.vsub(vec, self.F.mat_mul(coeff[None, :], mat[:nr])[0])

    def residual_rows(self, deg: int, rows: np.ndarray) -> np.ndarray:
        if self._nr.get(deg, 0) == 0 or rows.size == 0:
            return np.array(rows, dtype=np.int64, copy=True)
        mat, piv, nr = self._mat[deg], self._piv[deg], self._nr[deg]
        return self.F.vsub(rows, self.F.mat_mul(rows[:, piv[:nr]], mat[:nr]))

    def contains_vec(self, deg: int, vec: np.ndarray) -> bool:
        return not np.any(self.residual(deg, vec))

    def contains_element(self, elt) -> bool:
        return all(self.contains_vec(d, v) for d, v in elt.comps.items())

    def contains(self, other: "GradedSubspace") -> bool:
        for d in other.degrees():
            if self._nr.get(d, 0) < other._nr.get(d, 0):
                return False
            if np.any(self.residual_rows(d, other.rows(d))):
                return False
        return True

    def is_full(self) -> bool:
        return all(self._nr.get(d, 0) == dd for d, dd in self.L.dims.items())

    def element_rows(self, deg: int):
        from .cartan import AlgebraElement

        return [AlgebraElement(self.L, {deg: r.copy()}) for r in self.rows(deg)]

    def __repr__(self):
        return f"GradedSubspace({self.L.family}, dims {self.dims()}, total {self.dim()})"


def subspace_from_elements(L, elements) -> GradedSubspace:
    gs = GradedSubspace(L)
    for e in elements:
        for d, v in e.comps.items():
            gs.insert(d, v)
    return gs


def full_subspace(L) -> GradedSubspace:
    gs = GradedSubspace(L)
    for d in L.dims:
        gs.insert_full_component(d)
    return gs


# ----------------------------------------------------------------------


def ad_matrix(L, deg_g: int, gvec: np.ndarray, src_deg: int) -> np.ndarray:
    """Matrix (rows = source basis) of u -> [g, u] on one source component."""
    ptr, bc, kc, vals, d_j, d_k = L.pair(deg_g, src_deg)
    return kernels.ad_block(ptr, bc, kc, vals, gvec, d_j, d_k, L.p, L.F.eps)


def solve_ad_constraint(L, target_degree: int, gens, prev: GradedSubspace,
                        extra=None) -> np.ndarray:
    """Exact solution rows of  {u in L_i : [g,u] in prev for all generators}.

    ``extra`` optionally adds a second constraint  [w, u] in prev2  given as a
    pair (w_element, prev2).  The linear system is assembled in the quotient
    coordinates of each bracket target and solved by a left-nullspace
    computation; the rank-nullity identity is asserted on every call.
    """
    i = target_degree
    d_i = L.dims.get(i, 0)
    if d_i == 0:
        return np.zeros((0, 0), dtype=np.int64)
    blocks = []
    pairs = [(g, prev) for g in gens]
    if extra is not None:
        pairs.append(extra)
    for g, space in pairs:
        dg = g.degree()
        tgt = i + dg
        M = ad_matrix(L, dg, g.vec(dg), i)
        if tgt not in L.dims:
            if np.any(M):
                raise DomainError("bracket leaves the grading range")
            continue
        blocks.append(space.residual_rows(tgt, M))
    if not blocks:
        return np.eye(d_i, dtype=np.int64)
    C = np.concatenate(blocks, axis=1)
    sol = left_nullspace(L.F, C)
    assert sol.shape[0] + rank_of(L.F, C) == d_i
    return sol


def bracket_closure(L, seeds, certificate: GradedSubspace | None = None,
                    max_steps: int | None = None):
    """Least subalgebra containing the seeds, via a worklist fixpoint.

    Seeds may be AlgebraElements or a GradedSubspace.  When ``certificate``
    is given the walk stops as soon as the span contains it, returning
    (span, True); the caller guarantees that the certificate generates L.
    Otherwise returns (subalgebra, None) at the fixpoint.
    """
    F = L.F
    gs = GradedSubspace(L)
    spanning: list[tuple[int, np.ndarray]] = []

    def push(deg, rows):
        for r in gs.insert_batch(deg, rows):
            spanning.append((deg, r))

    if isinstance(seeds, GradedSubspace):
        for d in seeds.degrees():
            push(d, seeds.rows(d))
    else:
        for e in seeds:
            for d, v in sorted(e.comps.items()):
                push(d, v.reshape(1, -1))

    def certified() -> bool:
        return certificate is not None and gs.contains(certificate)

    if certified():
        return gs, True
    t = 0
    full_dim = L.dim()
    while t < len(spanning):
        deg_v, v = spanning[t]
        t += 1
        partners: dict[int, list[np.ndarray]] = {}
        for dj, w in spanning[:t]:
            partners.setdefault(dj, []).append(w)
        for dj, ws in sorted(partners.items()):
            tgt = deg_v + dj
            if tgt not in L.dims:
                continue
            M = ad_matrix(L, deg_v, v, dj)
            if not np.any(M):
                continue
            out = F.mat_mul(np.array(ws), M)
            push(tgt, out)
        if max_steps is not None and t > max_steps:
            raise DomainError("closure step budget exceeded")
        if certificate is not None and certified():
            return gs, True
        if gs.dim() == full_dim:
            return gs, (True if certificate is not None else None)
    return gs, (False if certificate is not None else None)


def echelon_insert(gs: GradedSubspace, elt) -> bool:
    """Insert a homogeneous element; returns whether the dimension grew."""
    deg = elt.degree()
    return gs.insert(deg, elt.vec(deg))
