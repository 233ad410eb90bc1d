"""Finite-dimensional Lie algebras with exact structure constants."""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from sympy import Poly, QQ, Symbol
from sympy.polys.matrices import DomainMatrix

from . import linalg as la
from .errors import (
    DimensionMismatch,
    IrrationalEigenvalues,
    JacobiViolation,
    NotAnIdeal,
    NotSolvable,
    NotTriangular,
    ParseError,
)
from .linalg import Subspace, Vector
from .scalars import REAL, domain_for, format_scalar, parse_scalar


class LieAlgebra:
    """Lie algebra given by structure constants [e_i, e_j] = sum_k c_ij^k e_k.

    Indices are 0-based internally; labels default to ``e1..em``.
    """

    def __init__(self, m: int, brackets: dict, mode: str = REAL, labels: Sequence[str] | None = None,
                 check: bool = True):
        self.m = m
        self.mode = mode
        self.K = domain_for(mode)
        self.labels = tuple(labels) if labels else tuple(f"e{i + 1}" for i in range(m))
        if len(self.labels) != m:
            raise DimensionMismatch("label count differs from dimension", dim=m, labels=len(self.labels))
        K = self.K
        table: dict = {}
        for (i, j), vec in brackets.items():
            if not (0 <= i < m and 0 <= j < m):
                raise DimensionMismatch(f"bracket index ({i + 1},{j + 1}) out of range", dim=m)
            if len(vec) != m:
                raise DimensionMismatch("bracket vector has wrong length", dim=m, got=len(vec))
            if i == j:
                if not la.is_zero(vec):
                    raise JacobiViolation("nonzero self-bracket", i=i + 1)
                continue
            if i > j:
                i, j, vec = j, i, la.vscale(-K.one, vec)
            prev = table.get((i, j))
            if prev is not None and prev != tuple(vec):
                raise JacobiViolation("inconsistent antisymmetric pair", i=i + 1, j=j + 1)
            table[(i, j)] = tuple(K.convert(c) for c in vec)
        # sparse form for both orders, used by the straightening engine
        self.sparse: dict = {}
        for (i, j), vec in table.items():
            d = {k: c for k, c in enumerate(vec) if c}
            if d:
                self.sparse[(i, j)] = d
                self.sparse[(j, i)] = {k: -c for k, c in d.items()}
        if check:
            self._check_jacobi()

    # -- basic structure --------------------------------------------------
    def bracket_basis(self, i: int, j: int) -> Vector:
        out = [self.K.zero] * self.m
        for k, c in self.sparse.get((i, j), {}).items():
            out[k] = c
        return tuple(out)

    def bracket(self, x: Vector, y: Vector) -> Vector:
        if len(x) != self.m or len(y) != self.m:
            raise DimensionMismatch("vector length differs from dimension", dim=self.m)
        out = [self.K.zero] * self.m
        for (i, j), d in self.sparse.items():
            if x[i] and y[j]:
                c = x[i] * y[j]
                for k, v in d.items():
                    out[k] += c * v
        return tuple(out)

    def unit(self, i: int) -> Vector:
        return la.unit_vec(i, self.m, self.K)

    def _check_jacobi(self) -> None:
        m = self.m
        for i in range(m):
            for j in range(i + 1, m):
                for k in range(j + 1, m):
                    ei, ej, ek = self.unit(i), self.unit(j), self.unit(k)
                    r = la.vadd(la.vadd(self.bracket(ei, self.bracket(ej, ek)),
                                        self.bracket(ej, self.bracket(ek, ei))),
                                self.bracket(ek, self.bracket(ei, ej)))
                    if not la.is_zero(r):
                        raise JacobiViolation(
                            f"Jacobi identity fails on (e{i + 1},e{j + 1},e{k + 1})",
                            triple=[i + 1, j + 1, k + 1],
                            residual=[format_scalar(c, self.K) for c in r],
                        )

    def ad(self, x: Vector | int) -> DomainMatrix:
        """Matrix of ad x; column j holds [x, e_j]."""
        if isinstance(x, int):
            x = self.unit(x)
        cols = [self.bracket(x, self.unit(j)) for j in range(self.m)]
        return la.dm(cols, self.K).transpose() if self.m else la.zeros(0, self.K)

    def bracket_space(self, U: Subspace, V: Subspace) -> Subspace:
        vecs = [self.bracket(u, v) for u in U.basis for v in V.basis]
        return Subspace.span(vecs, self.m, self.K)

    @cached_property
    def whole(self) -> Subspace:
        return Subspace.full(self.m, self.K)

    def is_ideal(self, I: Subspace) -> bool:
        return self.whole.dim == 0 or self.bracket_space(self.whole, I).dim == 0 or \
            I.contains_space(self.bracket_space(self.whole, I))

    def is_subalgebra(self, S: Subspace) -> bool:
        return S.contains_space(self.bracket_space(S, S))

    # -- series -------------------------------------------------------------
    def derived_series(self) -> list[Subspace]:
        out = [self.whole]
        while True:
            nxt = self.bracket_space(out[-1], out[-1])
            if nxt == out[-1]:
                return out
            out.append(nxt)
            if nxt.dim == 0:
                return out

    def lower_central_series(self, S: Subspace | None = None) -> list[Subspace]:
        """LCS of the subalgebra S (default: the whole algebra): S, [S,S], [S,[S,S]], ..."""
        S = self.whole if S is None else S
        out = [S]
        while out[-1].dim:
            nxt = self.bracket_space(S, out[-1])
            if nxt == out[-1]:
                break
            out.append(nxt)
        return out

    @cached_property
    def is_solvable(self) -> bool:
        return self.derived_series()[-1].dim == 0

    @cached_property
    def is_nilpotent(self) -> bool:
        return self.lower_central_series()[-1].dim == 0

    @cached_property
    def derived(self) -> Subspace:
        return self.bracket_space(self.whole, self.whole)

    def nilradical(self) -> Subspace:
        """For a solvable algebra the nilradical used throughout is [g, g]."""
        if not self.is_solvable:
            raise NotSolvable("algebra is not solvable")
        n = self.derived
        if not self.is_ideal(n) or self.lower_central_series(n)[-1].dim != 0:
            raise NotSolvable("derived algebra is not a nilpotent ideal")
        return n

    def center(self) -> Subspace:
        m = self.m
        # x in center iff sum_i x_i [e_i, e_j] = 0 for all j
        rows = []
        for j in range(m):
            cols = [self.bracket_basis(i, j) for i in range(m)]
            for k in range(m):
                rows.append([cols[i][k] for i in range(m)])
        if not rows:
            return Subspace.zero(m, self.K)
        return Subspace.span(la.nullspace_vectors(la.dm(rows, self.K)), m, self.K)

    # -- split and filtration ---------------------------------------------
    @cached_property
    def split(self) -> int | None:
        """k such that e_{k+1..m} span [g,g], or None if the basis is not ordered that way."""
        if not self.is_solvable:
            return None
        n = self.derived
        k = self.m - n.dim
        tail = Subspace.span([self.unit(i) for i in range(k, self.m)], self.m, self.K)
        return k if tail == n else None

    @cached_property
    def nil_weights(self) -> tuple[int, ...]:
        """Depth of each basis vector in the LCS of the nilradical (0 off the nilradical)."""
        n = self.derived
        lcs = self.lower_central_series(n)
        out = []
        for i in range(self.m):
            v = self.unit(i)
            w = 0
            for depth, term in enumerate(lcs, start=1):
                if term.dim and term.contains(v):
                    w = depth
            out.append(w)
        return tuple(out)

    @cached_property
    def filtration_adapted(self) -> bool:
        """True when, for every depth j, basis vectors of weight >= j span the j-th LCS term."""
        w = self.nil_weights
        for depth, term in enumerate(self.lower_central_series(self.derived), start=1):
            span = Subspace.span([self.unit(i) for i in range(self.m) if w[i] >= depth], self.m, self.K)
            if span != term:
                return False
        return True

    # -- constructions ------------------------------------------------------
    def quotient(self, I: Subspace) -> tuple["LieAlgebra", "Projection"]:
        if not self.is_ideal(I):
            raise NotAnIdeal("subspace is not an ideal")
        proj = Projection(self, I)
        idx = proj.kept
        r = len(idx)
        br = {}
        for a in range(r):
            for b in range(a + 1, r):
                v = proj(self.bracket_basis(idx[a], idx[b]))
                if not la.is_zero(v):
                    br[(a, b)] = v
        Q = LieAlgebra(r, br, self.mode, [self.labels[i] for i in idx], check=False)
        for a in range(r):
            for b in range(r):
                lhs = proj(self.bracket(self.unit(idx[a]), self.unit(idx[b])))
                assert lhs == Q.bracket(Q.unit(a), Q.unit(b))
        return Q, proj

    def change_basis(self, rows: Sequence[Vector], labels: Sequence[str] | None = None) -> "LieAlgebra":
        """Algebra in the basis f_a = sum_i rows[a][i] e_i."""
        P = la.dm(rows, self.K)
        Pinv = P.inv()
        m = self.m
        br = {}
        for a in range(m):
            for b in range(a + 1, m):
                v = self.bracket(rows[a], rows[b])
                c = la.rows_of(la.dm([v], self.K) * Pinv)[0]
                if not la.is_zero(c):
                    br[(a, b)] = c
        return LieAlgebra(m, br, self.mode, labels or [f"f{i + 1}" for i in range(m)])

    def same_as(self, other: "LieAlgebra") -> bool:
        return self.m == other.m and self.mode == other.mode and self.sparse == other.sparse

    # -- serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        br = []
        for i in range(self.m):
            for j in range(i + 1, self.m):
                d = self.sparse.get((i, j))
                if d:
                    br.append({"i": i + 1, "j": j + 1,
                               "c": {str(k + 1): format_scalar(c, self.K) for k, c in sorted(d.items())}})
        return {"dim": self.m, "mode": self.mode, "basis": list(self.labels), "brackets": br}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, data: dict) -> "LieAlgebra":
        try:
            m = int(data["dim"])
            mode = data.get("mode", REAL)
            K = domain_for(mode)
            table = {}
            for entry in data.get("brackets", []):
                i, j = int(entry["i"]) - 1, int(entry["j"]) - 1
                vec = [K.zero] * m
                for k, c in entry["c"].items():
                    kk = int(k) - 1
                    if not 0 <= kk < m:
                        raise DimensionMismatch(f"basis index {k} out of range", dim=m)
                    vec[kk] = parse_scalar(c, K)
                if i >= j:
                    raise ParseError("bracket entries need i < j", i=i + 1, j=j + 1)
                table[(i, j)] = tuple(vec)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed Lie algebra description: {exc}") from exc
        return cls(m, table, mode, data.get("basis"))

    @classmethod
    def from_json(cls, text: str) -> "LieAlgebra":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def __repr__(self) -> str:
        return f"LieAlgebra(dim={self.m}, mode={self.mode}, brackets={len(self.sparse) // 2})"


def validate_structure(constants: dict, mode: str = REAL, m: int | None = None,
                       labels: Sequence[str] | None = None) -> LieAlgebra:
    """Build an algebra from {(i, j): {k: c}} with 1-based i < j, checking Jacobi exactly."""
    K = domain_for(mode)
    if m is None:
        m = max((max(i, j, *d.keys()) for (i, j), d in constants.items()), default=0)
    table = {}
    for (i, j), d in constants.items():
        vec = [K.zero] * m
        for k, c in d.items():
            if not 1 <= k <= m:
                raise DimensionMismatch(f"index {k} exceeds dimension {m}", dim=m)
            vec[k - 1] = c if not isinstance(c, str) else parse_scalar(c, K)
            vec[k - 1] = K.convert(vec[k - 1])
        table[(i - 1, j - 1)] = tuple(vec)
    return LieAlgebra(m, table, mode, labels)


def bracket(x: Vector, y: Vector, L: LieAlgebra) -> Vector:
    return L.bracket(x, y)


class Projection:
    """Quotient map g -> g/I using the non-pivot coordinates of the echelon form of I."""

    def __init__(self, L: LieAlgebra, I: Subspace):
        self.L = L
        self.I = I
        self.kept = tuple(I.complement_units())

    def reduce(self, v: Vector) -> Vector:
        c = [v[p] for p in self.I.pivots]
        return la.vsub(tuple(v), la.lincomb(c, self.I.basis, self.L.m, self.L.K))

    def __call__(self, v: Vector) -> Vector:
        r = self.reduce(v)
        return tuple(r[i] for i in self.kept)

    def lift(self, w: Vector) -> Vector:
        out = [self.L.K.zero] * self.L.m
        for a, i in enumerate(self.kept):
            out[i] = w[a]
        return tuple(out)


# -- eigenvalues -------------------------------------------------------------
_X = Symbol("x")


def split_roots(charpoly: Sequence, K, witness: int | None = None) -> list:
    """Distinct roots in K of a characteristic polynomial (coefficients high to low).

    Raises NotTriangular if a real-mode polynomial has non-real roots and
    IrrationalEigenvalues if roots exist outside K otherwise.
    """
    coeffs = [K.convert(c) for c in charpoly]
    p = Poly(coeffs, _X, domain=K)
    if p.degree() <= 0:
        return []
    _, factors = p.factor_list()
    roots, rest = [], []
    for f, _mult in factors:
        if f.degree() == 1:
            a, b = f.all_coeffs()
            roots.append(K.convert(-K.convert(b) / K.convert(a)))
        else:
            rest.append(f)
    for f in rest:
        if K == QQ and f.count_roots() < f.degree():
            raise NotTriangular("ad has non-real eigenvalues", witness=witness)
        raise IrrationalEigenvalues("eigenvalues are not in the exact scalar field", witness=witness,
                                    factor=str(f.as_expr()))
    return sorted(set(roots), key=_root_key)


def _root_key(r):
    if hasattr(r, "x"):
        return (r.x, r.y)
    return (r,)


def restricted(A: DomainMatrix, W: Subspace) -> DomainMatrix:
    """Matrix of A on the invariant subspace W, in W's echelon basis (columns = images)."""
    cols = []
    for w in W.basis:
        c = W.coords(la.mat_vec(A, w))
        if c is None:
            raise NotAnIdeal("subspace is not invariant")
        cols.append(c)
    return la.dm(cols, W.K).transpose()


def common_eigenvector(ops: Sequence[DomainMatrix], W: Subspace, witnesses: Sequence[int]) -> Vector:
    """Joint eigenvector of commuting operators preserving W (lowest index ties)."""
    K = W.K
    for A, wit in zip(ops, witnesses):
        if W.dim == 1:
            break
        R = restricted(A, W)
        roots = split_roots(R.charpoly(), K, witness=wit)
        lam = roots[0]
        # kernel of (A - lam) restricted to W, expressed back in ambient coordinates
        Rl = R - DomainMatrix.eye(W.dim, K) * K.convert(lam)
        ker = la.nullspace_vectors(Rl.to_dense())
        W = Subspace.span([la.lincomb(c, W.basis, W.m, K) for c in ker], W.m, K)
    return W.basis[0]


@dataclass(frozen=True)
class FlagCertificate:
    ideals: tuple          # Subspaces, dims 0..m
    functionals: tuple     # per step j>=1: tuple of eigenvalues of ad e_i on I_j / I_{j-1}

    def check(self, L: LieAlgebra) -> bool:
        for j, I in enumerate(self.ideals):
            if I.dim != j or not L.is_ideal(I):
                return False
            if j and not I.contains_space(self.ideals[j - 1]):
                return False
        return True


def triangular_flag(L: LieAlgebra) -> FlagCertificate:
    """Full flag of ideals with eigenvalue functionals, or NotTriangular / IrrationalEigenvalues."""
    if not L.is_solvable:
        raise NotSolvable("algebra is not solvable")
    ideals = _flag(L)
    funcs = []
    for j in range(1, len(ideals)):
        prev, cur = ideals[j - 1], ideals[j]
        # the new direction: any vector of cur outside prev
        v = next(b for b in cur.basis if not prev.contains(b))
        vals = []
        for i in range(L.m):
            w = L.bracket(L.unit(i), v)
            # w = c v modulo prev
            red = _reduce_mod(prev, w)
            redv = _reduce_mod(prev, v)
            piv = next(t for t, x in enumerate(redv) if x)
            c = red[piv] / redv[piv]
            vals.append(c)
        funcs.append(tuple(vals))
    cert = FlagCertificate(tuple(ideals), tuple(funcs))
    assert cert.check(L)
    return cert


def _reduce_mod(S: Subspace, v: Vector) -> Vector:
    c = [v[p] for p in S.pivots]
    return la.vsub(tuple(v), la.lincomb(c, S.basis, S.m, S.K))


def _flag(L: LieAlgebra) -> list[Subspace]:
    m, K = L.m, L.K
    if m == 0:
        return [Subspace.zero(0, K)]
    n = L.derived
    lcs = L.lower_central_series(n)
    # last nonzero LCS term of the nilradical; ad's commute there
    A = L.whole if n.dim == 0 else [t for t in lcs if t.dim][-1]
    try:
        v = common_eigenvector([L.ad(i) for i in range(m)], A, list(range(m)))
    except (NotTriangular, IrrationalEigenvalues) as exc:
        w = exc.payload.get("witness")
        if w is not None:
            exc.payload["label"] = L.labels[w]
        raise
    I1 = Subspace.span([v], m, K)
    Q, proj = L.quotient(I1)
    try:
        sub = _flag(Q)
    except (NotTriangular, IrrationalEigenvalues) as exc:
        w = exc.payload.get("witness")
        if w is not None:
            exc.payload["witness"] = proj.kept[w]
            exc.payload["label"] = L.labels[proj.kept[w]]
        raise
    out = [Subspace.zero(m, K), I1]
    for J in sub[1:]:
        out.append(Subspace.span(list(I1.basis) + [proj.lift(b) for b in J.basis], m, K))
    return out
