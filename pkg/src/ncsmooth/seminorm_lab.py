"""Seminorms of matrix functions, nested triangular algebras and domination checks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import coeffs as cf
from . import linalg as la
from .errors import ChainMismatch, SmoothUnsupported, SystemIncomplete
from .grid import CompactBox, grid_sup, grid_sup_joint
from .ncfunc import NCFunctionElement, coefficient_seminorm, to_uea
from .pbw import project_below
from .reps import AdaptedSystem, MatrixFunction, shift_vector, tilde_pi
from .scalars import to_float

MAX_ROW_SUM = "max-row-sum"
OPERATOR_2 = "operator-2"
SLACK = 1e-9


@dataclass(frozen=True)
class SeminormSpec:
    """Data (p, K, n) of ||.||_{p,K,n} plus the matrix norm used pointwise."""

    p: int
    box: CompactBox
    n: int = 0
    norm: str = MAX_ROW_SUM

    def __post_init__(self):
        if self.norm not in (MAX_ROW_SUM, OPERATOR_2):
            raise ValueError(f"unknown matrix norm {self.norm!r}")
        if self.n < 0:
            raise ValueError("derivative order must be nonnegative")


def pointwise_norm(V: np.ndarray, norm: str = MAX_ROW_SUM) -> np.ndarray:
    """Matrix norm of each V[a] (shape (N, d, d))."""
    if V.shape[1] == 0:
        return np.zeros(V.shape[0])
    if norm == MAX_ROW_SUM:
        return np.abs(V).sum(axis=2).max(axis=1)
    return np.linalg.norm(V, 2, axis=(1, 2))


def _sup_norm_of(F: MatrixFunction, norm: str):
    if norm == MAX_ROW_SUM:
        return F.max_row_sum_sup
    return lambda X: pointwise_norm(F.evaluate(X), norm)


def _jobs(F: MatrixFunction, box: CompactBox, n: int, norm: str) -> list:
    jobs = []
    for gamma in cf.multi_indices(box.k, n):
        D = F.derivative(gamma)
        jobs.append((_sup_norm_of(D, norm), box) if D.entries else (lambda X: 0.0, box))
    return jobs


def matrix_seminorm(F: MatrixFunction, spec: SeminormSpec, detail: bool = False):
    """sum over |gamma| = n of sup_K ||d^gamma F||."""
    if F.d != spec.p:
        raise ValueError(f"matrix size {F.d} does not match p={spec.p}")
    ests = [grid_sup(ev, box) for ev, box in _jobs(F, spec.box, spec.n, spec.norm)]
    total = float(sum(e.value for e in ests))
    return (total, ests) if detail else total


# -- nested triangular algebras -------------------------------------------------
class NestedTriangularElement:
    """Upper-triangular p x p matrix; entry (i, j) lives on boxes[j], boxes decreasing."""

    def __init__(self, boxes: Sequence[CompactBox], entries: dict):
        self.boxes = tuple(boxes)
        for a, b in zip(self.boxes, self.boxes[1:]):
            if not a.contains_box(b):
                raise ChainMismatch("boxes must decrease: K_{j+1} inside K_j")
        self.p = len(self.boxes)
        if any(j < i for i, j in entries):
            raise ValueError("entries below the diagonal")
        self.entries = {ij: f for ij, f in entries.items() if not cf.is_zero(f)}

    @property
    def k(self) -> int:
        return self.boxes[0].k

    def entry(self, i, j):
        return self.entries.get((i, j))

    def __eq__(self, other) -> bool:
        return (isinstance(other, NestedTriangularElement) and self.boxes == other.boxes
                and self.entries == other.entries)

    def __mul__(self, other):
        return nested_multiply(self, other)


def nested_multiply(A: NestedTriangularElement, B: NestedTriangularElement) -> NestedTriangularElement:
    """h_ik = sum_j f_ij g_jk; f_ij is only ever read on K_k, which sits inside K_j."""
    if A.boxes != B.boxes:
        raise ChainMismatch("factors use different box chains")
    out: dict = {}
    for (i, j), f in A.entries.items():
        for kk in range(j, A.p):
            g = B.entries.get((j, kk))
            if g is None:
                continue
            term = cf.mul(f, g)
            out[(i, kk)] = cf.add(out[(i, kk)], term) if (i, kk) in out else term
    return NestedTriangularElement(A.boxes, out)


def nested_seminorm(A: NestedTriangularElement, n: int) -> float:
    """sum over i <= j of |h_ij|_{K_j, n}."""
    return float(sum(coefficient_seminorm(f, A.boxes[j], n)[0] for (i, j), f in A.entries.items()))


# -- domination -----------------------------------------------------------------
def exact_rep_constant(M) -> float:
    return to_float(la.max_row_sum_exact(M))


def _require(system: AdaptedSystem | None, beta: Sequence[int]) -> None:
    if system is None:
        raise SystemIncomplete("no adapted system available for this algebra")
    k = system.k
    missing = [k + i + 1 for i, b in enumerate(beta) if b and (k + i) not in system.reps
               and system.beta_rep is None]
    if missing:
        raise SystemIncomplete("representations missing for generators", missing=missing)


_last_symbols: list = []


def _symbols(a: NCFunctionElement, beta: tuple, system: AdaptedSystem):
    """pi~(a) and pi~(P_beta a); the last pair is kept since callers sweep boxes and orders."""
    if _last_symbols and _last_symbols[0] is a and _last_symbols[1] == beta and _last_symbols[2] is system:
        return _last_symbols[3]
    pi, k = system.rep_for(beta), system.k
    u = to_uea(a)
    pair = (tilde_pi(pi, u, k), tilde_pi(pi, project_below(u, beta), k))
    _last_symbols[:] = [a, beta, system, pair]
    return pair


def verify_domination(a: NCFunctionElement, beta: Sequence[int], M: CompactBox, l: int,
                      system: AdaptedSystem, norm: str = MAX_ROW_SUM) -> dict:
    """Check |a|_{beta,M,l} <= C^-1 (||pi_beta~(a)||_{M-mu,l} + ||pi_beta~(P_beta a)||_{M-mu,l}).

    C = ||pi_beta(e^beta)|| is computed exactly. All suprema are taken on one
    common grid so the node-wise triangle inequality survives.
    """
    beta = tuple(beta)
    _require(system, beta)
    if not a.is_polynomial:
        raise SmoothUnsupported("domination checks need polynomial coefficients")
    k = system.k
    pi = system.rep_for(beta)
    Eb = pi.of_monomial((0,) * k + beta)
    C = exact_rep_constant(Eb) if norm == MAX_ROW_SUM else float(np.linalg.norm(
        np.array([[to_float(x) for x in row] for row in Eb.to_Matrix().tolist()], dtype=float), 2))
    mu = shift_vector(system, beta)
    Mshift = M.shifted([-c for c in mu])
    F1, F2 = _symbols(a, beta, system)
    f = a.coefficient(beta)
    lhs_jobs = [((lambda X, g=cf.differentiate(f, gm): np.abs(cf.evaluate(g, X))), M)
                for gm in cf.multi_indices(M.k, l)]
    j1 = _jobs(F1, Mshift, l, norm)
    j2 = _jobs(F2, Mshift, l, norm)
    ests = grid_sup_joint(lhs_jobs + j1 + j2)
    n1, n2 = len(lhs_jobs), len(j1)
    lhs = float(sum(e.value for e in ests[:n1]))
    t1 = float(sum(e.value for e in ests[n1:n1 + n2]))
    t2 = float(sum(e.value for e in ests[n1 + n2:]))
    rhs = (t1 + t2) / C if C else float("inf")
    return {"lhs": lhs, "rhs": rhs, "C": C, "pass": bool(lhs <= rhs + SLACK),
            "mu": [to_float(c) for c in mu], "box": str(M), "shifted_box": str(Mshift),
            "points_per_axis": ests[0].points_per_axis if ests else 0,
            "converged": all(e.converged for e in ests)}


def shift_identity(system: AdaptedSystem, f, beta: Sequence[int], M: CompactBox, l: int,
                   norm: str = MAX_ROW_SUM) -> tuple[float, float]:
    """(C |f|_{M,l}, ||pi_beta~(Phi(f) e^beta)||_{M-mu,l}); equal because the symbol is S_mu f (x) pi_beta(e^beta)."""
    beta = tuple(beta)
    k = system.k
    pi = system.rep_for(beta)
    C = exact_rep_constant(pi.of_monomial((0,) * k + beta))
    mu = shift_vector(system, beta)
    Mshift = M.shifted([-c for c in mu])
    a = NCFunctionElement(system.algebra, {beta: f}, k)
    F = tilde_pi(pi, to_uea(a), k)
    lhs_jobs = [((lambda X, g=cf.differentiate(f, gm): np.abs(cf.evaluate(g, X))), M)
                for gm in cf.multi_indices(M.k, l)]
    jf = _jobs(F, Mshift, l, norm)
    ests = grid_sup_joint(lhs_jobs + jf)
    n1 = len(lhs_jobs)
    return C * sum(e.value for e in ests[:n1]), float(sum(e.value for e in ests[n1:]))


def rho_embed(a: NCFunctionElement, system: AdaptedSystem, betas: Sequence[Sequence[int]],
              box: CompactBox, n: int = 0, norm: str = MAX_ROW_SUM) -> list[float]:
    """Finite window of beta -> ||pi_beta~(a)||_{d_beta, box, n}."""
    u = to_uea(a)
    out = []
    for beta in betas:
        pi = system.rep_for(tuple(beta))
        F = tilde_pi(pi, u, system.k)
        out.append(matrix_seminorm(F, SeminormSpec(pi.d, box, n, norm)))
    return out
