"""Truncated elements sum_beta Phi(f_beta) e^beta with polynomial or smooth coefficients."""
from __future__ import annotations

import json
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import coeffs as cf
from .errors import AlgebraMismatch, ModeMismatch, SmoothUnsupported
from .grid import CompactBox, SupEstimate, grid_sup
from .lie_core import LieAlgebra
from .pbw import (
    UEAElement,
    engine,
    n_degree,
    phi,
    poly_ring,
    split_terms,
    uea_multiply,
)
from .scalars import COMPLEX, format_scalar, parse_scalar

SMOOTH = "smooth"
HOLOMORPHIC = "holomorphic"


def beta_degree(L: LieAlgebra, k: int, beta: Sequence[int]) -> int:
    return n_degree(L, (0,) * k + tuple(beta), k)


class NCFunctionElement:
    """Map beta -> coefficient f_beta in k variables, kept modulo nilradical degree > N."""

    __slots__ = ("L", "k", "N", "mode", "terms")

    def __init__(self, L: LieAlgebra, terms: dict | None = None, k: int | None = None,
                 N: int | None = None, mode: str | None = None):
        self.L = L
        self.k = L.split if k is None else k
        if self.k is None:
            raise ValueError("split k is not determined for this basis")
        self.mode = mode or (HOLOMORPHIC if L.mode == COMPLEX else SMOOTH)
        clean = {}
        for beta, f in (terms or {}).items():
            beta = tuple(beta)
            if len(beta) != L.m - self.k:
                raise ValueError("beta has the wrong length")
            if cf.is_zero(f):
                continue
            clean[beta] = f
        if N is None:
            N = max((beta_degree(L, self.k, b) for b in clean), default=0)
        self.N = N
        self.terms = {b: f for b, f in clean.items() if beta_degree(L, self.k, b) <= N}

    # -- constructors --------------------------------------------------------------
    @classmethod
    def zero(cls, L, k=None, N=0, mode=None):
        return cls(L, {}, k, N, mode)

    @classmethod
    def one(cls, L, k=None, N=0, mode=None):
        k = L.split if k is None else k
        return cls(L, {(0,) * (L.m - k): poly_ring(L.K, k).one}, k, N, mode)

    @classmethod
    def monomial(cls, L, f, beta, k=None, N=None, mode=None):
        return cls(L, {tuple(beta): f}, k, N, mode)

    @property
    def is_polynomial(self) -> bool:
        return all(cf.is_polynomial(f) for f in self.terms.values())

    @property
    def approximate(self) -> bool:
        return any(not cf.is_polynomial(f) and f.approximate for f in self.terms.values())

    def coefficient(self, beta: Sequence[int]):
        f = self.terms.get(tuple(beta))
        return f if f is not None else poly_ring(self.L.K, self.k).zero

    def truncate(self, N: int) -> "NCFunctionElement":
        return NCFunctionElement(self.L, self.terms, self.k, min(N, self.N), self.mode)

    def _compatible(self, other: "NCFunctionElement") -> None:
        if not (other.L is self.L or other.L.same_as(self.L)) or other.k != self.k:
            raise AlgebraMismatch("elements belong to different algebras or splits")
        if other.mode != self.mode:
            raise ModeMismatch(f"cannot combine {self.mode} and {other.mode} elements")

    def __add__(self, other: "NCFunctionElement") -> "NCFunctionElement":
        self._compatible(other)
        out = dict(self.terms)
        for b, g in other.terms.items():
            out[b] = cf.add(out[b], g) if b in out else g
        return NCFunctionElement(self.L, out, self.k, min(self.N, other.N), self.mode)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "NCFunctionElement":
        return NCFunctionElement(self.L, {b: cf.scale(c, f) for b, f in self.terms.items()},
                                 self.k, self.N, self.mode)

    def __mul__(self, other):
        if isinstance(other, NCFunctionElement):
            return nc_multiply(self, other)
        return self.scale(other)

    def __eq__(self, other) -> bool:
        """Exact equality (polynomial coefficients only; smooth ones compare by identity)."""
        return (isinstance(other, NCFunctionElement) and self.k == other.k
                and self.L.same_as(other.L) and self.terms == other.terms)

    def __repr__(self) -> str:
        return f"NCFunctionElement(N={self.N}, {format_nc(self)})"


# -- conversion -------------------------------------------------------------------
def from_uea(a: UEAElement, k: int | None = None, N: int | None = None,
             mode: str | None = None) -> NCFunctionElement:
    k = a.k if k is None else k
    a = UEAElement(a.L, a.terms, k)
    return NCFunctionElement(a.L, split_terms(a), k, N, mode)


def to_uea(a: NCFunctionElement) -> UEAElement:
    if not a.is_polynomial:
        raise SmoothUnsupported("only polynomial coefficients map back to U(g)")
    k = a.k
    terms = {}
    for beta, f in a.terms.items():
        for mono, c in f.items():
            terms[tuple(mono[:k]) + tuple(beta)] = c
    return UEAElement(a.L, terms, k)


# -- multiplication ---------------------------------------------------------------
def nc_multiply(a: NCFunctionElement, b: NCFunctionElement) -> NCFunctionElement:
    """Product modulo nilradical degree > min(N_a, N_b)."""
    a._compatible(b)
    N = min(a.N, b.N)
    a, b = a.truncate(N), b.truncate(N)
    if a.is_polynomial and b.is_polynomial:
        return _poly_product(a, b, N)
    if not a.L.is_nilpotent:
        raise SmoothUnsupported("smooth coefficients need a nilpotent algebra")
    return _smooth_product(a, b, N)


def _poly_product(a, b, N):
    L, k = a.L, a.k
    eng = engine(L)
    zero = L.K.zero
    out: dict = {}
    ua, ub = to_uea(a), to_uea(b)
    for al, ca in ua.terms.items():
        for be, cb in ub.terms.items():
            # nilradical degree never drops, so skip pairs already over the cap
            if n_degree(L, al, k) + n_degree(L, be, k) > N:
                continue
            for g, cg in eng.times_mono(al, be).items():
                if n_degree(L, g, k) <= N:
                    out[g] = out.get(g, zero) + ca * cb * cg
    return from_uea(UEAElement(L, out, k), k, N, a.mode)


def nilpotency_class(L: LieAlgebra) -> int:
    return sum(1 for t in L.lower_central_series() if t.dim)


@lru_cache(maxsize=None)
def _bidiff_table(L: LieAlgebra, k: int, beta: tuple, gamma: tuple, N: int) -> dict:
    """{delta: [(a1, a2, c)]} with Phi(f)e^beta * Phi(g)e^gamma =
    sum_delta Phi(sum c d^a1 f d^a2 g) e^delta  (truncated at N).

    The operator commutes with translations (e_i -> e_i + c_i is an automorphism
    for i <= k), so its coefficients are constant and c = const term / (a1! a2!).
    """
    R = poly_ring(L.K, k)
    bound = nilpotency_class(L) * max(N, 1)
    table: dict = {}
    pairs = []
    for total in range(bound + 1):
        for t1 in range(total + 1):
            for a1 in cf.multi_indices(k, t1):
                for a2 in cf.multi_indices(k, total - t1):
                    pairs.append((a1, a2))
    for a1, a2 in pairs:
        x = NCFunctionElement(L, {beta: R({a1 if k else (0,): L.K.one})}, k, N)
        y = NCFunctionElement(L, {gamma: R({a2 if k else (0,): L.K.one})}, k, N)
        prod = _poly_product(x, y, N)
        fac = cf.multi_factorial(a1) * cf.multi_factorial(a2)
        for delta, h in prod.terms.items():
            c0 = h.coeff(1) if k else h.LC
            if c0:
                table.setdefault(delta, []).append((a1, a2, c0 / L.K(fac)))
    return table


def _smooth_product(a, b, N):
    L, k = a.L, a.k
    out: dict = {}
    for beta, f in a.terms.items():
        for gamma, g in b.terms.items():
            if beta_degree(L, k, beta) + beta_degree(L, k, gamma) > N:
                continue
            for delta, ops in _bidiff_table(L, k, beta, gamma, N).items():
                for a1, a2, c in ops:
                    term = cf.scale(c, cf.mul(cf.differentiate(f, a1), cf.differentiate(g, a2)))
                    out[delta] = cf.add(out[delta], term) if delta in out else term
    return NCFunctionElement(L, out, k, N, a.mode)


def commutation_rule(L: LieAlgebra, j: int, f, k: int | None = None, N: int | None = None
                     ) -> NCFunctionElement:
    """PBW expansion of e_j * Phi(f) for a nilradical generator j (0-based)."""
    k = L.split if k is None else k
    prod = uea_multiply(UEAElement.gen(L, j, k), phi(f, L, k))
    return from_uea(prod, k, N)


# -- seminorms --------------------------------------------------------------------
def coefficient_seminorm(f, box: CompactBox, l: int) -> tuple[float, list[SupEstimate]]:
    """sum over |gamma| = l of sup_box |d^gamma f| (grid estimate) and the per-gamma estimates."""
    total = 0.0
    details = []
    for gamma in cf.multi_indices(box.k, l):
        g = cf.differentiate(f, gamma)
        if cf.is_zero(g):
            details.append(SupEstimate(0.0, 0, True))
            continue
        est = grid_sup(lambda X, g=g: np.abs(cf.evaluate(g, X)), box)
        details.append(est)
        total += est.value
    return total, details


def nc_seminorm(a: NCFunctionElement, beta: Sequence[int], box: CompactBox, l: int) -> float:
    f = a.terms.get(tuple(beta))
    if f is None:
        return 0.0
    return coefficient_seminorm(f, box, l)[0]


# -- text and JSON ----------------------------------------------------------------
def format_nc(a: NCFunctionElement) -> str:
    if a.is_polynomial:
        from .pbw import format_element
        return format_element(to_uea(a))
    parts = []
    for beta in sorted(a.terms):
        f = a.terms[beta]
        parts.append(f"[{f if cf.is_polynomial(f) else getattr(f, 'name', 'smooth')}]*e^{list(beta)}")
    return " + ".join(parts) or "0"


def _poly_to_dict(f, K) -> dict:
    return {",".join(map(str, mono)): format_scalar(c, K) for mono, c in sorted(f.items())}


def _poly_from_dict(data: dict, K, k: int):
    R = poly_ring(K, k)
    terms = {}
    for key, val in data.items():
        mono = tuple(int(x) for x in key.split(",")) if key else ()
        terms[mono] = parse_scalar(val, K)
    return R(terms)


def nc_to_dict(a: NCFunctionElement) -> dict:
    K = a.L.K
    terms = []
    for beta in sorted(a.terms):
        f = a.terms[beta]
        entry = {"beta": list(beta)}
        if cf.is_polynomial(f):
            entry["poly"] = _poly_to_dict(f, K)
        else:
            entry["opaque"] = getattr(f, "name", "smooth")
        terms.append(entry)
    return {"split": a.k, "N": a.N, "mode": a.mode, "terms": terms}


def nc_from_dict(data: dict, L: LieAlgebra) -> NCFunctionElement:
    k = int(data["split"])
    terms = {}
    for entry in data.get("terms", []):
        if "poly" not in entry:
            raise ValueError("opaque (smooth) coefficients cannot be read back")
        terms[tuple(entry["beta"])] = _poly_from_dict(entry["poly"], L.K, k)
    return NCFunctionElement(L, terms, k, data.get("N"), data.get("mode"))


def nc_to_json(a: NCFunctionElement) -> str:
    return json.dumps(nc_to_dict(a), sort_keys=True)


# -- basis changes ----------------------------------------------------------------
def transport_uea(a: UEAElement, target: LieAlgebra, images: Sequence[Sequence]) -> UEAElement:
    """Image of a under the algebra map e_i -> images[i] (coordinates in ``target``)."""
    gens = []
    for v in images:
        terms = {tuple(1 if t == j else 0 for t in range(target.m)): c for j, c in enumerate(v) if c}
        gens.append(UEAElement(target, terms))
    out = UEAElement(target, {})
    for alpha, c in a.terms.items():
        term = UEAElement.one(target).scale(c)
        for i, n in enumerate(alpha):
            for _ in range(n):
                term = term * gens[i]
        out = out + term
    return out
