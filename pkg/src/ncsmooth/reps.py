"""Representations: adjoint, nilpotent quotients of U(g), adapted systems, tensor powers, symbols."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from sympy.polys.matrices import DomainMatrix

from . import _kernels
from . import coeffs as cf
from . import linalg as la
from .errors import (
    IrrationalEigenvalues,
    NotNilpotent,
    NotTriangular,
    SmoothUnsupported,
    UnknownName,
    Unsupported,
)
from .lie_core import LieAlgebra, common_eigenvector, split_roots, triangular_flag
from .linalg import Subspace, Vector
from .pbw import UEAElement, engine, poly_ring, shift, split_terms, word_of
from .scalars import format_scalar, to_complex


# =============================================================================
# Representation
# =============================================================================
class Representation:
    """Matrices pi(e_i) for the basis of ``L`` (d x d, exact)."""

    def __init__(self, L: LieAlgebra, mats: Sequence[DomainMatrix], name: str = "",
                 distinguished: int | None = None, check: bool = True):
        self.L = L
        self.mats = tuple(M.to_sparse() for M in mats)
        self.name = name
        self.distinguished = distinguished
        if len(self.mats) != L.m:
            raise ValueError("one matrix per basis element required")
        self.d = self.mats[0].shape[0] if self.mats else 0
        self._pow: dict = {}
        if check and not self.is_homomorphism():
            raise ValueError(f"matrices do not define a representation ({name})")

    @property
    def K(self):
        return self.L.K

    def of(self, x: Vector) -> DomainMatrix:
        out = la.zeros(self.d, self.K)
        for c, M in zip(x, self.mats):
            if c:
                out = out + M * self.K.convert(c)
        return out

    def power(self, i: int, n: int) -> DomainMatrix:
        key = (i, n)
        hit = self._pow.get(key)
        if hit is None:
            hit = la.identity(self.d, self.K) if n == 0 else self.power(i, n - 1) * self.mats[i]
            self._pow[key] = hit
        return hit

    def of_monomial(self, alpha: Sequence[int]) -> DomainMatrix:
        out = la.identity(self.d, self.K)
        for i, n in enumerate(alpha):
            if n:
                out = out * self.power(i, n)
        return out

    def of_uea(self, a: UEAElement) -> DomainMatrix:
        out = la.zeros(self.d, self.K)
        for alpha, c in a.terms.items():
            out = out + self.of_monomial(alpha) * c
        return out

    def is_homomorphism(self) -> bool:
        L = self.L
        for i in range(L.m):
            for j in range(i + 1, L.m):
                lhs = self.of(L.bracket_basis(i, j))
                rhs = self.mats[i] * self.mats[j] - self.mats[j] * self.mats[i]
                if lhs != rhs:
                    return False
        return True

    @cached_property
    def is_upper_triangular(self) -> bool:
        return all(la.is_upper_triangular(M) for M in self.mats)

    @cached_property
    def nilpotent_image(self) -> bool:
        """Every pi(x) nilpotent (checked through a triangular form when available)."""
        if self.is_upper_triangular:
            return all(not dict(M.rep).get(i, {}).get(i) for M in self.mats for i in range(self.d))
        # in general: the image spans a Lie algebra of nilpotent matrices iff each basis image is
        # nilpotent and the image algebra is nilpotent; triangularize to decide
        try:
            return triangularize(self).nilpotent_image
        except (NotTriangular, IrrationalEigenvalues):
            return False

    def transported(self, rows: Sequence[Vector], L_new: LieAlgebra) -> "Representation":
        """Same representation expressed on the basis f_a = sum_i rows[a][i] e_i."""
        return Representation(L_new, [self.of(r) for r in rows], self.name, self.distinguished)

    def conjugated(self, P: DomainMatrix) -> "Representation":
        Pinv = P.inv()
        return Representation(self.L, [Pinv * M * P for M in self.mats], self.name,
                              self.distinguished, check=False)

    def to_dict(self) -> dict:
        fmt = lambda c: format_scalar(c, self.K)
        return {"dimension": self.d, "name": self.name,
                "matrices": [la.to_rows_str(M, fmt) for M in self.mats],
                "flags": {"nilpotent_image": bool(self.nilpotent_image),
                          "upper_triangular": bool(self.is_upper_triangular),
                          "distinguished": None if self.distinguished is None else self.distinguished + 1}}


def adjoint_rep(L: LieAlgebra) -> Representation:
    return Representation(L, [L.ad(i) for i in range(L.m)], name="ad")


# =============================================================================
# Nilpotent quotients U(n)/U_q
# =============================================================================
def lcs_adapted_basis(L: LieAlgebra) -> tuple[list[Vector], list[int]]:
    """Basis f_1..f_m with weights: f_a lies in the w_a-th LCS term, and for each j the
    vectors of weight >= j span that term. Deepest vectors come last."""
    lcs = L.lower_central_series()
    if lcs[-1].dim:
        raise NotNilpotent("algebra is not nilpotent")
    rows: list[Vector] = []
    weights: list[int] = []
    span = Subspace.zero(L.m, L.K)
    for depth in range(len(lcs) - 1, 0, -1):
        term = lcs[depth - 1]
        for v in term.basis:
            if not span.contains(v):
                rows.append(v)
                weights.append(depth)
                span = span + Subspace.span([v], L.m, L.K)
    order = sorted(range(len(rows)), key=lambda a: weights[a])
    return [rows[a] for a in order], [weights[a] for a in order]


def vector_weight(v: Vector, lcs: Sequence[Subspace]) -> int:
    w = 0
    for depth, term in enumerate(lcs, start=1):
        if term.dim and term.contains(v):
            w = depth
    return w


class _TruncatedEnvelope:
    """U(N)/U_q for a nilpotent N in an LCS-adapted basis with weights w."""

    def __init__(self, N: LieAlgebra, weights: Sequence[int], q: int):
        self.N = N
        self.w = tuple(weights)
        self.q = q
        self.monos = self._monomials()
        self.index = {g: i for i, g in enumerate(self.monos)}
        self.dim = len(self.monos)
        self.eng = engine(N)

    def weight(self, gamma) -> int:
        return sum(n * w for n, w in zip(gamma, self.w))

    def _monomials(self) -> list:
        bounds = [(self.q - 1) // w for w in self.w]
        monos = [g for g in itertools.product(*(range(b + 1) for b in bounds)) if self.weight(g) < self.q]
        # decreasing weight makes left multiplication strictly upper triangular
        monos.sort(key=lambda g: (-self.weight(g), tuple(-x for x in g)))
        return monos

    def _vec(self, terms: dict) -> dict:
        return {self.index[g]: c for g, c in terms.items() if c and self.weight(g) < self.q}

    def left_mult(self, a: int) -> DomainMatrix:
        unit = tuple(1 if i == a else 0 for i in range(self.N.m))
        cols = {}
        for j, g in enumerate(self.monos):
            cols[j] = self._vec(self.eng.times_mono(unit, g))
        return self._matrix(cols)

    def derivation(self, D: DomainMatrix) -> DomainMatrix:
        """Extension of a derivation D of N (columns = images of basis vectors)."""
        K = self.N.K
        m = self.N.m
        images = [la.rows_of(D.transpose())[a] for a in range(m)]
        cols = {}
        for j, g in enumerate(self.monos):
            word = word_of(g)
            acc: dict = {}
            for pos, letter in enumerate(word):
                img = images[letter]
                if la.is_zero(img):
                    continue
                cur = {(0,) * m: K.one}
                for t, ltr in enumerate(word):
                    nxt: dict = {}
                    if t == pos:
                        for h, c in cur.items():
                            for b, cb in enumerate(img):
                                if cb:
                                    for h2, c2 in self.eng.times_gen(h, b).items():
                                        nxt[h2] = nxt.get(h2, K.zero) + c * cb * c2
                    else:
                        for h, c in cur.items():
                            for h2, c2 in self.eng.times_gen(h, ltr).items():
                                nxt[h2] = nxt.get(h2, K.zero) + c * c2
                    cur = {h: c for h, c in nxt.items() if c and self.weight(h) < self.q}
                for h, c in cur.items():
                    acc[h] = acc.get(h, K.zero) + c
            cols[j] = self._vec(acc)
        return self._matrix(cols)

    def _matrix(self, cols: dict) -> DomainMatrix:
        dod: dict = {}
        for j, col in cols.items():
            for i, c in col.items():
                if c:
                    dod.setdefault(i, {})[j] = c
        return DomainMatrix(dod, (self.dim, self.dim), self.N.K)


def nilpotent_quotient_rep(L: LieAlgebra, p: int) -> Representation:
    """Left-regular representation on U(L)/U_p, U_p the p-th power of the augmentation ideal.

    In an LCS-adapted basis, U_p is spanned by PBW monomials of weight >= p, so the
    representation space has the monomials of weight < p as basis.
    """
    if p < 1:
        raise ValueError("p must be positive")
    if not L.is_nilpotent:
        raise NotNilpotent("algebra is not nilpotent")
    rows, weights = lcs_adapted_basis(L)
    N = L.change_basis(rows) if rows else L
    env = _TruncatedEnvelope(N, weights, p)
    left = [env.left_mult(a) for a in range(L.m)]
    # e_i = sum_a Rinv[i][a] f_a
    Rinv = la.rows_of(la.dm(rows, L.K).inv()) if rows else []
    mats = []
    for i in range(L.m):
        M = la.zeros(env.dim, L.K)
        for a, c in enumerate(Rinv[i]):
            if c:
                M = M + left[a] * c
        mats.append(M)
    rep = Representation(L, mats, name=f"U/U_{p}")
    rep.monomials = env.monos
    rep.adapted_rows = rows
    return rep


# =============================================================================
# Cartan data and the representation for a central element (case 1)
# =============================================================================
def fitting_null(L: LieAlgebra, y: Vector) -> Subspace:
    A = L.ad(y).to_dense()
    P = A
    for _ in range(L.m - 1):
        P = P * A
    return Subspace.span(la.nullspace_vectors(P), L.m, L.K)


def cartan_subalgebra(L: LieAlgebra) -> Subspace:
    m, K = L.m, L.K
    cands = [L.unit(i) for i in range(m)]
    cands.append(tuple(K.one for _ in range(m)))
    for s in range(1, 4):
        cands.append(tuple(K(i + s) for i in range(m)))
        cands.append(tuple(K((-1) ** i * (i + s)) for i in range(m)))
    best = None
    for y in cands:
        h = fitting_null(L, y)
        if best is None or h.dim < best.dim:
            best = h
    h = best
    if not L.is_subalgebra(h) or L.lower_central_series(h)[-1].dim:
        raise Unsupported("no nilpotent Cartan subalgebra found among candidates", case=1)
    normal = _normalizer(L, h)
    if normal != h:
        raise Unsupported("Cartan candidate is not self-normalizing", case=1)
    return h


def _normalizer(L: LieAlgebra, S: Subspace) -> Subspace:
    m, K = L.m, L.K
    # z such that [z, s] is in S for all s in S: pass to the quotient coordinates of S
    comp = S.complement_units()
    rows = []
    for s in S.basis:
        cols = [L.bracket(L.unit(i), s) for i in range(m)]
        for c in comp:
            # coordinate c after reducing modulo S
            red = []
            for v in cols:
                coeffs = [v[p] for p in S.pivots]
                r = la.vsub(v, la.lincomb(coeffs, S.basis, m, K))
                red.append(r[c])
            rows.append(red)
    if not rows:
        return L.whole
    return Subspace.span(la.nullspace_vectors(la.dm(rows, K)), m, K)


def weight_decomposition(L: LieAlgebra, h: Subspace) -> list[tuple[tuple, Subspace]]:
    """Joint generalized eigenspaces of ad(h) with rational weights (values on h's basis)."""
    m, K = L.m, L.K
    parts = [((), L.whole)]
    for hb in h.basis:
        A = L.ad(hb).to_dense()
        try:
            roots = split_roots(A.charpoly(), K)
        except (NotTriangular, IrrationalEigenvalues) as exc:
            raise Unsupported("Cartan subalgebra has eigenvalues outside the exact field", case=1) from exc
        new = []
        for lam, W in parts:
            for c in roots:
                B = A - DomainMatrix.eye(m, K).to_dense() * c
                P = B
                for _ in range(m - 1):
                    P = P * B
                G = Subspace.span(la.nullspace_vectors(P), m, K)
                X = W.intersect(G)
                if X.dim:
                    new.append((lam + (c,), X))
        parts = new
    assert sum(W.dim for _, W in parts) == m
    return parts


def semisimple_parts(L: LieAlgebra) -> list[DomainMatrix]:
    """sigma(e_i): semisimple part of ad on the Cartan component, zero on [g,g]."""
    m, K = L.m, L.K
    n = L.derived
    h = cartan_subalgebra(L)
    parts = weight_decomposition(L, h)
    cols = [v for _, W in parts for v in W.basis]
    B = la.dm(cols, K).transpose()
    Binv = B.inv()
    # weight functionals on g: lam(h_b) given, lam = 0 on [g,g]
    eqs = [list(v) for v in h.basis] + [list(v) for v in n.basis]
    A = la.dm(eqs, K)
    funcs = []
    for lam, _ in parts:
        rhs = tuple(lam) + tuple(K.zero for _ in n.basis)
        sol = la.solve(A, rhs)
        if sol is None:
            raise Unsupported("weights do not factor through g/[g,g]", case=1)
        funcs.append(sol)
    sig = []
    for i in range(m):
        diag = []
        for (lam, W), f in zip(parts, funcs):
            diag.extend([f[i]] * W.dim)
        D = DomainMatrix.diag(diag, K) if diag else la.zeros(0, K)
        sig.append((B * D.to_dense() * Binv).to_sparse())
    # verify derivation property and commutativity exactly
    for S in sig:
        for a in range(m):
            for b in range(a + 1, m):
                lhs = la.mat_vec(S, L.bracket_basis(a, b))
                rhs = la.vadd(L.bracket(la.mat_vec(S, L.unit(a)), L.unit(b)),
                              L.bracket(L.unit(a), la.mat_vec(S, L.unit(b))))
                if lhs != rhs:
                    raise Unsupported("semisimple part is not a derivation", case=1)
    for S, T in itertools.combinations(sig, 2):
        if S * T != T * S:
            raise Unsupported("semisimple parts do not commute", case=1)
    return sig


def central_rep(L: LieAlgebra, x: Vector) -> Representation:
    """Representation with pi(x) != 0 and pi(y) pi(x) = 0 for every y (x central, in [g,g]).

    Nilpotent L: left-regular action on U(L)/U_q, q = depth(x) + 1. Otherwise the
    algebra is rebuilt as a nilpotent one with [y,z]' = [y,z] - s(y)z + s(z)y, where s
    collects semisimple parts of ad on a Cartan subalgebra, and y acts by left
    multiplication plus the derivation induced by s(y).
    """
    m, K = L.m, L.K
    if L.is_nilpotent:
        q = vector_weight(x, L.lower_central_series()) + 1
        rep = nilpotent_quotient_rep(L, q)
        rep.distinguished = None
        return rep
    sig = semisimple_parts(L)
    br = {}
    for a in range(m):
        for b in range(a + 1, m):
            v = L.bracket_basis(a, b)
            v = la.vsub(v, la.mat_vec(sig[a], L.unit(b)))
            v = la.vadd(v, la.mat_vec(sig[b], L.unit(a)))
            if not la.is_zero(v):
                br[(a, b)] = v
    Nhat = LieAlgebra(m, br, L.mode, check=True)
    if not Nhat.is_nilpotent:
        raise Unsupported("modified algebra is not nilpotent", case=1)
    rows, weights = lcs_adapted_basis(Nhat)
    N = Nhat.change_basis(rows)
    q = vector_weight(x, Nhat.lower_central_series()) + 1
    env = _TruncatedEnvelope(N, weights, q)
    R = la.dm(rows, K)
    Rinv = la.rows_of(R.inv())
    left = [env.left_mult(a) for a in range(m)]
    mats = []
    for i in range(m):
        M = la.zeros(env.dim, K)
        for a, c in enumerate(Rinv[i]):
            if c:
                M = M + left[a] * c
        S = sig[i]
        if not S.is_zero_matrix:
            # S in f-coordinates: f-coords of S f_a
            Sf = R * S.to_dense().transpose() * R.inv()  # row a: f-coords of S f_a
            M = M + env.derivation(Sf.transpose())
        mats.append(M)
    rep = Representation(L, mats, name=f"ado_q{q}")
    Px = rep.of(x)
    if Px.is_zero_matrix or any(not (M * Px).is_zero_matrix for M in rep.mats):
        raise Unsupported("central representation failed its defining property", case=1)
    return rep


# =============================================================================
# Triangularization
# =============================================================================
def triangularize(rep: Representation) -> Representation:
    """Upper-triangular form via iterated common eigenvectors on quotients."""
    L, K, d = rep.L, rep.K, rep.d
    if rep.is_upper_triangular:
        return rep
    n = L.derived
    nil_mats = [rep.of(v) for v in n.basis]
    comp_idx = n.complement_units()
    comp_mats = [rep.mats[i] for i in comp_idx]
    chosen: list[Vector] = []
    S = Subspace.zero(d, K)
    for _ in range(d):
        kept = S.complement_units()

        def project(M):
            cols = []
            for c in kept:
                v = la.mat_vec(M, la.unit_vec(c, d, K))
                coeffs = [v[p] for p in S.pivots]
                r = la.vsub(v, la.lincomb(coeffs, S.basis, d, K))
                cols.append(tuple(r[t] for t in kept))
            return la.dm(cols, K).transpose()

        dq = len(kept)
        if nil_mats:
            stacked = [list(r) for M in nil_mats for r in la.rows_of(project(M).to_dense())]
            W = Subspace.span(la.nullspace_vectors(la.dm(stacked, K)), dq, K)
        else:
            W = Subspace.full(dq, K)
        if W.dim == 0:
            raise NotTriangular("nilradical does not act nilpotently")
        try:
            u = common_eigenvector([project(M) for M in comp_mats], W, comp_idx)
        except NotTriangular as exc:
            w = exc.payload.get("witness")
            if w is not None:
                exc.payload["label"] = L.labels[w]
            raise
        v = tuple(u[kept.index(t)] if t in kept else K.zero for t in range(d))
        chosen.append(v)
        S = S + Subspace.span([v], d, K)
    P = la.dm(chosen, K).transpose()
    out = rep.conjugated(P)
    assert out.is_upper_triangular and out.is_homomorphism()
    out.change_of_basis = P
    return out


# =============================================================================
# A-conditions and adapted systems
# =============================================================================
def _ratio(P: DomainMatrix, M: DomainMatrix):
    """c with P = c M (M nonzero), or None."""
    dod = dict(M.to_sparse().rep)
    i = min(dod)
    j = min(dod[i])
    Pd = dict(P.to_sparse().rep)
    c = Pd.get(i, {}).get(j, M.domain.zero) / dod[i][j]
    return c if P == M * c else None


def check_A_conditions(pi: Representation, x: Vector, L: LieAlgebra | None = None) -> dict:
    L = L or pi.L
    Px = pi.of(x)
    report = {"A1": not Px.is_zero_matrix, "A2": True, "A3": True, "mu": [], "witness": None}
    if not report["A1"]:
        report["A2"] = report["A3"] = False
        return report
    for j in range(L.m):
        c = _ratio(pi.mats[j] * Px, Px)
        if c is None:
            report["A2"] = False
            report["witness"] = L.labels[j]
            report["mu"].append(None)
        else:
            report["mu"].append(c)
    if report["A2"]:
        for v in L.derived.basis:
            if not (pi.of(v) * Px).is_zero_matrix:
                report["A3"] = False
    else:
        report["A3"] = False
    return report


@dataclass
class AdaptedSystem:
    """Adapted basis (complement first, nilradical last) with representations pi_r, r >= k.

    ``rows[a]`` are coordinates of the new basis vector f_a in the original basis;
    ``reps[r]`` act on ``algebra`` (the algebra rewritten in the new basis);
    ``mu[r][j]`` is the eigenvalue with pi_r(f_j) pi_r(f_r) = mu pi_r(f_r).
    """

    original: LieAlgebra
    rows: list
    k: int
    algebra: LieAlgebra
    reps: dict
    mu: dict = field(default_factory=dict)
    beta_rep: Callable | None = None
    _tensors: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def m(self) -> int:
        return self.algebra.m

    def rep_for(self, beta: Sequence[int]) -> Representation:
        beta = tuple(beta)
        if self.beta_rep is not None:
            return self.beta_rep(beta)
        if beta not in self._tensors:
            self._tensors[beta] = tensor_rep(self, beta)
        return self._tensors[beta]

    def verify(self) -> None:
        A = self.algebra
        if A.split != self.k:
            raise AssertionError("adapted basis does not end with a basis of [g,g]")
        for r, pi in self.reps.items():
            rep = check_A_conditions(pi, A.unit(r), A)
            if not (rep["A1"] and rep["A2"] and rep["A3"]):
                raise AssertionError(f"A-conditions fail for r={r + 1}: {rep}")
            self.mu[r] = tuple(rep["mu"])
            for j in range(r + 1, A.m):
                if not pi.mats[j].is_zero_matrix:
                    raise AssertionError(f"pi_{r + 1}(f_{j + 1}) != 0")

    def to_dict(self) -> dict:
        K = self.algebra.K
        fmt = lambda c: format_scalar(c, K)
        return {"k": self.k,
                "basis": [[fmt(c) for c in r] for r in self.rows],
                "algebra": self.algebra.to_dict(),
                "representations": {str(r + 1): pi.to_dict() for r, pi in sorted(self.reps.items())},
                "mu": {str(r + 1): [fmt(c) for c in v] for r, v in sorted(self.mu.items())}}


def _lift_into(n: Subspace, proj, w: Vector, L: LieAlgebra) -> Vector:
    cols = [proj(v) for v in n.basis]
    A = la.dm(cols, L.K).transpose()
    c = la.solve(A, w)
    assert c is not None
    return la.lincomb(c, n.basis, L.m, L.K)


def _pullback(rep: Representation, L: LieAlgebra, proj) -> Representation:
    return Representation(L, [rep.of(proj(L.unit(i))) for i in range(L.m)], rep.name)


def _build(L: LieAlgebra) -> tuple[list, list]:
    n = L.derived
    if n.dim == 0:
        return [], []
    K = L.K
    z = L.center()
    zn = z.intersect(n)
    if zn.dim or z.dim == 0:
        if zn.dim:
            x = zn.basis[0]
            rep = central_rep(L, x)
        else:
            lcs = L.lower_central_series(n)
            last = [t for t in lcs if t.dim][-1]
            x = common_eigenvector([L.ad(i) for i in range(L.m)], last, list(range(L.m)))
            rep = adjoint_rep(L)
        Q, proj = L.quotient(Subspace.span([x], L.m, K))
        rows_q, reps_q = _build(Q)
        lifted = [_lift_into(n, proj, r, L) for r in rows_q]
        return lifted + [x], [_pullback(r, L, proj) for r in reps_q] + [rep]
    Q, proj = L.quotient(z)
    rows_q, reps_q = _build(Q)
    return [_lift_into(n, proj, r, L) for r in rows_q], [_pullback(r, L, proj) for r in reps_q]


def build_adapted_system(L: LieAlgebra) -> AdaptedSystem:
    triangular_flag(L)
    nil_rows, reps = _build(L)
    n = L.derived
    comp = [L.unit(i) for i in n.complement_units()]
    rows = comp + nil_rows
    k = len(comp)
    labels = [L.labels[i] for i in n.complement_units()] + [f"n{j + 1}" for j in range(len(nil_rows))]
    if rows == [L.unit(i) for i in range(L.m)]:
        A = L
    else:
        A = L.change_basis(rows, labels)
    sysreps = {}
    for r, rep in enumerate(reps):
        moved = rep.transported(rows, A)
        sysreps[k + r] = triangularize(moved)
    system = AdaptedSystem(L, rows, k, A, sysreps)
    system.verify()
    return system


# =============================================================================
# Tensor representations and shifts
# =============================================================================
def tensor_rep(system: AdaptedSystem, beta: Sequence[int]) -> Representation:
    """pi_beta: tensor product of beta_r copies of pi_r, generators acting by Leibniz sums."""
    A, k = system.algebra, system.k
    beta = tuple(beta)
    if len(beta) != A.m - k:
        raise ValueError("beta must have one entry per nilradical generator")
    factors = [k + i for i, b in enumerate(beta) for _ in range(b)]
    K = A.K
    mats = [la.zeros(1, K) for _ in range(A.m)]
    cur = 1
    for r in factors:
        pi = system.reps[r]
        Id_new = la.identity(pi.d, K)
        Id_cur = la.identity(cur, K)
        mats = [la.kron(M, Id_new) + la.kron(Id_cur, pi.mats[j]) for j, M in enumerate(mats)]
        cur *= pi.d
    return Representation(A, mats, name=f"tensor{list(beta)}", check=False)


def shift_vector(system: AdaptedSystem, beta: Sequence[int]) -> tuple:
    """mu_j = sum_i beta_i mu_{j,i} over complement generators j."""
    K = system.algebra.K
    k = system.k
    out = []
    for j in range(k):
        s = K.zero
        for i, b in enumerate(beta):
            if b:
                s += b * system.mu[k + i][j]
        out.append(s)
    return tuple(out)


# =============================================================================
# Matrix functions and the symbol map
# =============================================================================
class MatrixFunction:
    """Upper-triangular d x d matrix of coefficient functions in k variables."""

    def __init__(self, d: int, k: int, K, entries: dict | None = None):
        self.d = d
        self.k = k
        self.K = K
        self.entries = {ij: f for ij, f in (entries or {}).items() if not cf.is_zero(f)}

    @classmethod
    def constant(cls, M: DomainMatrix, k: int) -> "MatrixFunction":
        R = poly_ring(M.domain, k)
        entries = {}
        for i, row in dict(M.to_sparse().rep).items():
            for j, c in row.items():
                entries[(i, j)] = R(c)
        return cls(M.shape[0], k, M.domain, entries)

    def add_term(self, i: int, j: int, f) -> None:
        prev = self.entries.get((i, j))
        new = f if prev is None else cf.add(prev, f)
        if cf.is_zero(new):
            self.entries.pop((i, j), None)
        else:
            self.entries[(i, j)] = new

    @property
    def is_polynomial(self) -> bool:
        return all(cf.is_polynomial(f) for f in self.entries.values())

    def is_upper_triangular(self) -> bool:
        return all(j >= i for i, j in self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, MatrixFunction) and self.d == other.d and self.entries == other.entries

    def __mul__(self, other: "MatrixFunction") -> "MatrixFunction":
        out = MatrixFunction(self.d, self.k, self.K)
        rows: dict = {}
        for (j, l), g in other.entries.items():
            rows.setdefault(j, []).append((l, g))
        for (i, j), f in self.entries.items():
            for l, g in rows.get(j, ()):
                out.add_term(i, l, cf.mul(f, g))
        return out

    def __add__(self, other: "MatrixFunction") -> "MatrixFunction":
        out = MatrixFunction(self.d, self.k, self.K, dict(self.entries))
        for (i, j), g in other.entries.items():
            out.add_term(i, j, g)
        return out

    def derivative(self, gamma: Sequence[int]) -> "MatrixFunction":
        return MatrixFunction(self.d, self.k, self.K,
                              {ij: cf.differentiate(f, gamma) for ij, f in self.entries.items()})

    def _packed(self):
        """Polynomial entries packed for one matrix product per evaluation (cached)."""
        keys = [ij for ij, f in self.entries.items() if cf.is_polynomial(f)]
        fs = [self.entries[ij] for ij in keys]
        cache = getattr(self, "_pack_cache", None)
        if cache is None or cache[0] != keys or any(a is not b for a, b in zip(cache[1], fs)):
            cache = (keys, fs, cf.pack_polys(fs, self.k))
            self._pack_cache = cache
        return cache[0], cache[2]

    def max_row_sum_sup(self, X: np.ndarray) -> float:
        """Largest max-row-sum norm over the rows of X, without forming the dense matrices."""
        X = np.atleast_2d(X)
        if any(not cf.is_polynomial(f) for f in self.entries.values()):
            return _kernels.max_row_sum_sup(self.evaluate(X))
        keys, (monos, C) = self._packed()
        if not keys:
            return 0.0
        rows = np.array([i for i, _ in keys], dtype=np.int64)
        if np.iscomplexobj(C) or np.iscomplexobj(X):
            vals = np.abs(cf.eval_packed(monos, C, X[:, :self.k]))
            sums = np.zeros((self.d, X.shape[0]))
            np.add.at(sums, rows, vals)
            return float(sums.max())
        return _kernels.packed_row_sum_sup(monos, C, rows, self.d, X[:, :self.k])

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        keys, (monos, C) = self._packed()
        vals = cf.eval_packed(monos, C, X[:, :self.k]) if keys else None
        rest = [(ij, f) for ij, f in self.entries.items() if not cf.is_polynomial(f)]
        complex_vals = bool(rest) or np.iscomplexobj(X) or (vals is not None and np.iscomplexobj(vals))
        out = np.zeros((X.shape[0], self.d * self.d), dtype=complex if complex_vals else float)
        if keys:
            out[:, [i * self.d + j for i, j in keys]] = vals.T
        out = out.reshape(X.shape[0], self.d, self.d)
        for (i, j), f in rest:
            out[:, i, j] = cf.evaluate(f, X)
        return out

    def entry(self, i: int, j: int):
        f = self.entries.get((i, j))
        return f if f is not None else poly_ring(self.K, self.k).zero

    def __repr__(self) -> str:
        return f"MatrixFunction(d={self.d}, entries={len(self.entries)})"


def _coefficient_map(a, k: int) -> dict:
    if isinstance(a, UEAElement):
        return split_terms(UEAElement(a.L, a.terms, k))
    return dict(a.terms)


def tilde_pi(pi: Representation, a, k: int | None = None) -> MatrixFunction:
    """Symbol: l_j + pi(e_j) for j <= k and pi(e_j) for j > k, extended multiplicatively.

    For a = sum Phi(f_beta) e^beta the image is
    sum_beta sum_r (d^r f_beta / r!) A_1^{r_1}..A_k^{r_k} pi(e^beta), A_j = pi(e_j).
    """
    L = pi.L
    k = (L.split if k is None else k)
    if k is None:
        raise ValueError("split not determined")
    K = L.K
    terms = _coefficient_map(a, k)
    out = MatrixFunction(pi.d, k, K)
    A = pi.mats[:k]
    nilp = [la.is_nilpotent(M) for M in A]
    cache: dict = {}

    def power_product(r):
        hit = cache.get(r)
        if hit is None:
            hit = la.identity(pi.d, K)
            for j, e in enumerate(r):
                if e:
                    hit = hit * pi.power(j, e)
            cache[r] = hit
        return hit

    for beta, f in terms.items():
        Mb = pi.of_monomial((0,) * k + tuple(beta))
        if Mb.is_zero_matrix:
            continue
        if cf.is_polynomial(f):
            degs = [f.degree(g) if f else 0 for g in f.ring.gens[:k]] if k else []
            bounds = [min(max(dg, 0), pi.d - 1) if nz else max(dg, 0) for dg, nz in zip(degs, nilp)]
            for r in itertools.product(*(range(b + 1) for b in bounds)):
                M = power_product(r) * Mb
                if M.is_zero_matrix:
                    continue
                g = cf.differentiate(f, r)
                if not g:
                    continue
                g = g * K.convert(1) / K.convert(cf.multi_factorial(r)) if any(r) else g
                for i, row in dict(M.to_sparse().rep).items():
                    for j, c in row.items():
                        out.add_term(i, j, g * c)
        elif all(nilp):
            for r in itertools.product(*(range(pi.d) for _ in range(k))):
                M = power_product(r) * Mb
                if M.is_zero_matrix:
                    continue
                g = cf.differentiate(f, r)
                fac = cf.multi_factorial(r)
                for i, row in dict(M.to_sparse().rep).items():
                    for j, c in row.items():
                        out.add_term(i, j, cf.Scaled(to_complex(c) / fac, cf.as_smooth(g))
                                     if to_complex(c).imag else cf.Scaled(to_complex(c).real / fac, cf.as_smooth(g)))
        elif len(terms) == 1:
            mu = []
            for j in range(k):
                c = _ratio(pi.mats[j] * Mb, Mb)
                if c is None:
                    raise SmoothUnsupported("shift path needs pi(e_j) pi(e^beta) proportional to pi(e^beta)")
                mu.append(to_complex(c).real)
            g = cf.Shifted(cf.as_smooth(f), mu)
            for i, row in dict(Mb.to_sparse().rep).items():
                for j, c in row.items():
                    out.add_term(i, j, cf.Scaled(to_complex(c).real, g))
        else:
            raise SmoothUnsupported("smooth coefficients need a nilpotent image or a monomial element")
    return out


def shifted_symbol(system: AdaptedSystem, f, beta: Sequence[int], pi: Representation | None = None
                   ) -> MatrixFunction:
    """S_mu f (x) pi_beta(e^beta), computed from the shift vector."""
    pi = pi or system.rep_for(beta)
    k = system.k
    mu = shift_vector(system, beta)
    g = shift(f, mu) if cf.is_polynomial(f) else cf.Shifted(f, [to_complex(c).real for c in mu])
    Mb = pi.of_monomial((0,) * k + tuple(beta))
    out = MatrixFunction(pi.d, k, system.algebra.K)
    for i, row in dict(Mb.to_sparse().rep).items():
        for j, c in row.items():
            out.add_term(i, j, g * c if cf.is_polynomial(g) else cf.Scaled(to_complex(c).real, g))
    return out


# =============================================================================
# Catalog
# =============================================================================
@dataclass
class CatalogEntry:
    name: str
    algebra: LieAlgebra
    system: AdaptedSystem | None
    reps: dict


def af1_rep(L: LieAlgebra, q: int) -> Representation:
    """e1 -> diag(q, ..., 1, 0), e2 -> superdiagonal ones (size q+1)."""
    K = L.K
    X = DomainMatrix.diag([K(q - i) for i in range(q + 1)], K).to_sparse()
    Y = DomainMatrix({i: {i + 1: K.one} for i in range(q)}, (q + 1, q + 1), K)
    return Representation(L, [X, Y], name=f"pi_{q}", distinguished=1)


def heisenberg_rep(L: LieAlgebra) -> Representation:
    K = L.K
    E = lambda i, j: DomainMatrix({i: {j: K.one}}, (3, 3), K)
    return Representation(L, [E(0, 1), E(1, 2), E(0, 2)], name="pi_1", distinguished=2)


def upper_triangular_algebra(p: int, mode: str = "real") -> LieAlgebra:
    """t_p: diagonal units first, then E_ij (i<j) by increasing j-i."""
    basis = [(i, i) for i in range(p)] + [(i, i + s) for s in range(1, p) for i in range(p - s)]
    index = {b: a for a, b in enumerate(basis)}
    m = len(basis)
    br = {}
    for a, (i, j) in enumerate(basis):
        for b, (kk, l) in enumerate(basis):
            if a >= b:
                continue
            vec = [0] * m
            if j == kk:
                vec[index[(i, l)]] += 1
            if l == i:
                vec[index[(kk, j)]] -= 1
            if any(vec):
                br[(a, b)] = tuple(vec)
    L0 = LieAlgebra(m, br, mode, [f"E{i + 1}{j + 1}" for i, j in basis])
    return L0


def _identity_rows(L: LieAlgebra) -> list:
    return [L.unit(i) for i in range(L.m)]


def catalog(name: str) -> CatalogEntry:
    key = name.strip().lower().replace(" ", "")
    m_ab = re.fullmatch(r"abelian\((\d+)\)", key) or re.fullmatch(r"abelian(\d+)", key)
    m_tri = re.fullmatch(r"tri\((\d+)\)", key) or re.fullmatch(r"tri(\d+)", key)
    if m_ab or key == "abelian":
        m = int(m_ab.group(1)) if m_ab else 2
        L = LieAlgebra(m, {})
        system = AdaptedSystem(L, _identity_rows(L), m, L, {})
        return CatalogEntry(f"abelian({m})", L, system, {"ad": adjoint_rep(L)})
    if key == "af1":
        L = LieAlgebra(2, {(0, 1): (0, 1)})
        reps = {f"pi_{q}": af1_rep(L, q) for q in range(5)}
        reps["ad"] = adjoint_rep(L)
        system = AdaptedSystem(L, _identity_rows(L), 1, L, {1: reps["pi_1"]},
                               beta_rep=lambda beta, L=L: af1_rep(L, beta[0]))
        system.verify()
        return CatalogEntry("af1", L, system, reps)
    if key in ("heisenberg", "h", "h3"):
        L = LieAlgebra(3, {(0, 1): (0, 0, 1)})
        pi1 = heisenberg_rep(L)
        system = AdaptedSystem(L, _identity_rows(L), 2, L, {2: pi1})
        system.verify()
        reps = {"pi_1": pi1, "ad": adjoint_rep(L)}
        for q in range(2, 5):
            reps[f"pi_{q}"] = tensor_rep(system, (q,))
        return CatalogEntry("heisenberg", L, system, reps)
    if key == "e2":
        L = LieAlgebra(3, {(0, 1): (0, 0, 1), (0, 2): (0, -1, 0)})
        return CatalogEntry("e2", L, None, {"ad": adjoint_rep(L)})
    if m_tri:
        p = int(m_tri.group(1))
        L = upper_triangular_algebra(p)
        system = build_adapted_system(L)
        return CatalogEntry(f"tri({p})", L, system, {"ad": adjoint_rep(L)})
    raise UnknownName(f"unknown catalog algebra {name!r}", name=name)


CATALOG_NAMES = ("abelian(2)", "af1", "heisenberg", "e2", "tri(2)", "tri(3)")
