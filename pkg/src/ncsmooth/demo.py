"""Blow-up of e2 commutators under polynomial approximation of 1/(l^2+1).

For e2 ([e1,e2]=e3, [e1,e3]=-e2) the e3-coefficient of e2*Phi(f) is
g(l) = (f(l-i) - f(l+i))/(2i). For f = 1/(l^2+1) this is 2/(l^3+4l), which is
unbounded near 0, so approximants f_n that converge on growing regions K_m produce
commutators whose size grows with m.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np
from sympy import QQ_I

from .errors import IllConditionedFit
from .ncfunc import commutation_rule
from .pbw import poly_ring, shift
from .lie_core import LieAlgebra

FIT_POINTS = 400
CHECK_POINTS = 4000
EXACT_DEGREE = 24
RESIDUAL_GOAL = 1e-3
DEFAULT_DEGREES = (12, 40, 80, 120, 160)


def target(z):
    return 1.0 / (z * z + 1.0)


def blowup(lam):
    return 2.0 / (lam ** 3 + 4.0 * lam)


def region_boundary(m: int, n: int = FIT_POINTS) -> np.ndarray:
    """Points on the boundary of K_m = {|Re| <= m, |Im| <= 1, |l -+ i| >= 1/m}.

    The approximation error is analytic inside K_m, so its maximum sits on the
    boundary. Points are symmetric under conjugation and l -> -l, which keeps
    least-squares fits real.
    """
    r = 1.0 / m
    q = n // 4
    na = max(8, int(q * 0.3))
    nt = int(q * 0.55)
    ns = q - na - nt
    arc = 1j + r * np.exp(1j * np.linspace(-np.pi / 2, 0, na, endpoint=False))
    t = np.linspace(0, 1, nt, endpoint=False)
    top = (r + (m - r) * (1 - np.cos(np.pi * t)) / 2) + 1j
    side = m + 1j * np.linspace(1, 0, ns)
    Q = np.concatenate([arc, top, side])
    return np.concatenate([Q, -Q.conj(), Q.conj(), -Q])


class ArnoldiPolynomial:
    """Least-squares polynomial in an Arnoldi-orthogonalized basis (stable at high degree)."""

    def __init__(self, Z: np.ndarray, F: np.ndarray, degree: int):
        if degree >= len(Z):
            raise IllConditionedFit("degree must stay below the number of fit points",
                                    degree=degree, points=len(Z))
        M = len(Z)
        Q = np.zeros((M, degree + 1), complex)
        Hm = np.zeros((degree + 1, degree), complex)
        Q[:, 0] = 1
        for k in range(degree):
            v = Z * Q[:, k]
            for j in range(k + 1):
                Hm[j, k] = Q[:, j].conj() @ v / M
                v = v - Hm[j, k] * Q[:, j]
            Hm[k + 1, k] = np.linalg.norm(v) / np.sqrt(M)
            Q[:, k + 1] = v / Hm[k + 1, k]
        self.coef = np.linalg.lstsq(Q, F, rcond=None)[0]
        self.H = Hm
        self.degree = degree

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        W = np.zeros((z.size, self.degree + 1), complex)
        W[:, 0] = 1
        for k in range(self.degree):
            w = z * W[:, k] - W[:, :k + 1] @ self.H[:k + 1, k]
            W[:, k + 1] = w / self.H[k + 1, k]
        return W @ self.coef


def _rational_poly(p: ArnoldiPolynomial, m: int):
    """Real rational polynomial interpolating p at Chebyshev points of [-m, m]."""
    n = p.degree
    x = m * np.cos(np.pi * (np.arange(n + 1) + 0.5) / (n + 1))
    coeffs = np.polynomial.polynomial.polyfit(x, p(x).real, n)
    R = poly_ring(QQ_I, 1)
    (l,) = R.gens
    out = R.zero
    for j, c in enumerate(coeffs):
        out += R(QQ_I.convert(Fraction(float(c)).limit_denominator(10 ** 12))) * l ** j
    return out


def e2_algebra(mode: str = "real") -> LieAlgebra:
    return LieAlgebra(3, {(0, 1): (0, 0, 1), (0, 2): (0, -1, 0)}, mode)


def exact_identity(f) -> bool:
    """e3-coefficient of e2*Phi(f) equals (f(l-i) - f(l+i))/(2i), exactly."""
    L = e2_algebra("complex")
    R = poly_ring(L.K, 1)
    f = R(dict(f.items()))
    rule = commutation_rule(L, 1, f, 1)
    i = L.K(0, 1)
    g = (shift(f, [-i]) - shift(f, [i])) * R(1 / (2 * i))
    h = (shift(f, [-i]) + shift(f, [i])) * R(L.K(1, 0) / 2)
    return rule.coefficient((0, 1)) == g and rule.coefficient((1, 0)) == h


def demo_e2_blowup(m_list: Sequence[int] = (2, 4, 8), degrees: Sequence[int] = DEFAULT_DEGREES,
                   points: int = FIT_POINTS) -> list[dict]:
    rows = []
    for m in m_list:
        Z = region_boundary(m, points)
        check = region_boundary(m, CHECK_POINTS)
        lam = np.linspace(1.0 / m, 1.0, 400)
        true = blowup(lam)
        for n in degrees:
            p = ArnoldiPolynomial(Z, target(Z), n)
            g = (p(lam - 1j) - p(lam + 1j)) / 2j
            row = {
                "m": m,
                "degree": n,
                "fit_points": len(Z),
                "grid_residual": float(np.abs(p(Z) - target(Z)).max()),
                "residual": float(np.abs(p(check) - target(check)).max()),
                "sup_g": float(np.abs(g).max()),
                "sup_target": float(true.max()),
                "sup_error": float(np.abs(g - true).max()),
                "max_imag_g": float(np.abs(g.imag).max()),
            }
            row["relative_gap"] = abs(row["sup_g"] - row["sup_target"]) / row["sup_target"]
            row["fit_ok"] = row["residual"] < RESIDUAL_GOAL
            if n <= EXACT_DEGREE:
                row["exact_identity"] = exact_identity(_rational_poly(p, m))
            rows.append(row)
    return rows


def best_rows(rows: list[dict]) -> dict:
    """Per m, the row with the smallest validated residual."""
    out: dict = {}
    for r in rows:
        cur = out.get(r["m"])
        if cur is None or r["residual"] < cur["residual"]:
            out[r["m"]] = r
    return out
