"""Exact linear algebra over QQ / QQ_I, built on sympy's DomainMatrix."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from sympy.polys.matrices import DomainMatrix

Vector = tuple


def zero_vec(m: int, K) -> Vector:
    return tuple(K.zero for _ in range(m))


def unit_vec(i: int, m: int, K) -> Vector:
    return tuple(K.one if j == i else K.zero for j in range(m))


def vadd(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v: Vector) -> Vector:
    return tuple(c * a for a in v)


def is_zero(v: Vector) -> bool:
    return all(not a for a in v)


def lincomb(coeffs: Sequence, vecs: Sequence[Vector], m: int, K) -> Vector:
    out = [K.zero] * m
    for c, v in zip(coeffs, vecs):
        if c:
            for j, a in enumerate(v):
                if a:
                    out[j] += c * a
    return tuple(out)


def dm(rows: Sequence[Sequence], K, ncols: int | None = None) -> DomainMatrix:
    rows = [list(r) for r in rows]
    if not rows:
        return DomainMatrix.zeros((0, ncols or 0), K)
    return DomainMatrix(rows, (len(rows), len(rows[0])), K)


def rows_of(M: DomainMatrix) -> list[Vector]:
    return [tuple(r) for r in M.to_dense().to_list()]


def rref_rows(vectors: Iterable[Vector], m: int, K) -> tuple[tuple[Vector, ...], tuple[int, ...]]:
    vecs = [tuple(v) for v in vectors if not is_zero(v)]
    if not vecs:
        return (), ()
    R, pivots = dm(vecs, K).rref()
    rows = rows_of(R)[: len(pivots)]
    return tuple(rows), tuple(pivots)


@dataclass(frozen=True)
class Subspace:
    """Subspace of K^m stored by its reduced echelon basis (canonical)."""

    m: int
    K: object
    basis: tuple
    pivots: tuple

    @classmethod
    def span(cls, vectors: Iterable[Vector], m: int, K) -> "Subspace":
        rows, piv = rref_rows(vectors, m, K)
        return cls(m, K, rows, piv)

    @classmethod
    def zero(cls, m: int, K) -> "Subspace":
        return cls(m, K, (), ())

    @classmethod
    def full(cls, m: int, K) -> "Subspace":
        return cls.span([unit_vec(i, m, K) for i in range(m)], m, K)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self.m == other.m and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.m, self.basis))

    def coords(self, v: Vector):
        """Coordinates of v in the echelon basis, or None if v is outside."""
        c = [v[p] for p in self.pivots]
        r = vsub(tuple(v), lincomb(c, self.basis, self.m, self.K))
        return tuple(c) if is_zero(r) else None

    def contains(self, v: Vector) -> bool:
        return self.coords(v) is not None

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.basis + other.basis, self.m, self.K)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.m, self.K)
        # solve sum a_i u_i = sum b_j w_j
        cols = list(self.basis) + [vscale(-self.K.one, w) for w in other.basis]
        A = dm(cols, self.K).transpose()
        ns = nullspace_vectors(A)
        vecs = [lincomb(n[: self.dim], self.basis, self.m, self.K) for n in ns]
        return Subspace.span(vecs, self.m, self.K)

    def complement_units(self) -> list[int]:
        """Standard basis indices spanning a complement (the non-pivots)."""
        return [i for i in range(self.m) if i not in self.pivots]


def nullspace_vectors(A: DomainMatrix) -> list[Vector]:
    """Basis of {x : A x = 0}."""
    ncols = A.shape[1]
    if A.shape[0] == 0:
        K = A.domain
        return [unit_vec(i, ncols, K) for i in range(ncols)]
    N = A.nullspace()
    return [v for v in rows_of(N) if not is_zero(v)]


def solve(A: DomainMatrix, b: Vector):
    """One solution x of A x = b, or None."""
    K = A.domain
    n, c = A.shape
    aug = A.hstack(dm([[x] for x in b], K)) if n else None
    if aug is None:
        return zero_vec(c, K) if is_zero(b) else None
    R, piv = aug.rref()
    if c in piv:
        return None
    rows = rows_of(R)
    x = [K.zero] * c
    for r, p in enumerate(piv):
        x[p] = rows[r][c]
    return tuple(x)


def mat_vec(A: DomainMatrix, v: Vector) -> Vector:
    return tuple(r[0] for r in (A * dm([[x] for x in v], A.domain)).to_dense().to_list())


def identity(d: int, K) -> DomainMatrix:
    return DomainMatrix.eye(d, K).to_sparse()


def zeros(d: int, K, cols: int | None = None) -> DomainMatrix:
    return DomainMatrix.zeros((d, d if cols is None else cols), K).to_sparse()


def kron(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    """Kronecker product of two sparse domain matrices."""
    K = A.domain
    (ra, ca), (rb, cb) = A.shape, B.shape
    a = A.to_sparse().rep.to_dod() if hasattr(A.rep, "to_dod") else dict(A.to_sparse().rep)
    b = B.to_sparse().rep.to_dod() if hasattr(B.rep, "to_dod") else dict(B.to_sparse().rep)
    out: dict = {}
    for i, row in a.items():
        for j, x in row.items():
            for k, brow in b.items():
                tgt = out.setdefault(i * rb + k, {})
                for l, y in brow.items():
                    tgt[j * cb + l] = x * y
    return DomainMatrix(out, (ra * rb, ca * cb), K)


def is_upper_triangular(A: DomainMatrix) -> bool:
    dod = dict(A.to_sparse().rep)
    return all(j >= i for i, row in dod.items() for j in row)


def is_nilpotent(A: DomainMatrix) -> bool:
    d = A.shape[0]
    if d == 0:
        return True
    P = A
    for _ in range(max(1, (d - 1).bit_length())):
        P = P * P
    return P.is_zero_matrix


def max_row_sum_exact(A: DomainMatrix):
    """Exact max-row-sum norm (rational entries only)."""
    best = A.domain.zero
    for row in dict(A.to_sparse().rep).values():
        s = sum((abs(x) for x in row.values()), A.domain.zero)
        if s > best:
            best = s
    return best


def to_rows_str(A: DomainMatrix, fmt) -> list[list[str]]:
    return [[fmt(x) for x in r] for r in A.to_dense().to_list()]
