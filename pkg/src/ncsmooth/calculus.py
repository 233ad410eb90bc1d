"""Growth and resolvent diagnostics for matrices; ordered and Weyl functional calculus."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import hermite as H
from numpy.polynomial import polynomial as P
from scipy.linalg import expm

from . import _kernels
from . import coeffs as cf
from .errors import (
    NonRealSpectrum,
    NotCommuting,
    NotNilpotent,
    SingularSolve,
    TruncationBudgetExceeded,
)

POLY_RESIDUAL = 0.1
SLOPE_WINDOW = 0.2
EXP_RESIDUAL = 0.5
EXP_SLOPE_JUMP = 1.0
OVERFLOW = 1e300

TAIL_TOL = 1e-9
MAX_S = 2.0 ** 10
START_NODES = 64
MAX_NODES = 2 ** 12
QUAD_TOL = 1e-10
# a sampled transform carries its own x-quadrature error near 1e-9
NUMERIC_QUAD_TOL = 1e-8


def _as_matrix(b) -> np.ndarray:
    b = np.asarray(b, dtype=complex)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("square matrix expected")
    if not np.all(np.isfinite(b)):
        raise ValueError("matrix has non-finite entries")
    return b


def _norm(M: np.ndarray, norm: str = "2") -> np.ndarray:
    """Norms of a stack (..., d, d); non-finite matrices get +inf."""
    bad = ~np.isfinite(M).all(axis=(-2, -1))
    if bad.any():
        M = np.where(bad[..., None, None], 0, M)
        return np.where(bad, np.inf, _norm(M, norm))
    if norm == "2":
        return np.linalg.norm(M, 2, axis=(-2, -1))
    if norm == "max-row-sum":
        return np.abs(M).sum(axis=-1).max(axis=-1)
    raise ValueError(f"unknown norm {norm!r}")


# =============================================================================
# growth of e^{isb}
# =============================================================================
@dataclass
class GrowthReport:
    alpha: float
    K: float
    residual: float
    tail_slope: float
    verdict: str
    table: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "K": self.K, "residual": self.residual,
                "tail_slope": self.tail_slope, "verdict": self.verdict}


def _fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ coef
    return float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(res ** 2)))


def exp_growth_scan(b, s_max: float = 1e5, samples: int = 241, norm: str = "2") -> GrowthReport:
    """Fit ||e^{isb}|| <= K (1+|s|)^alpha over the last two decades of a log grid.

    The scan is symmetric in s and uses the running maximum of the norm, which is
    the smallest nondecreasing envelope consistent with the bound.
    """
    b = _as_matrix(b)
    s = np.concatenate([[0.0], np.logspace(-2, math.log10(s_max), samples)])
    with np.errstate(over="ignore", invalid="ignore"):
        E_pos = expm(1j * s[:, None, None] * b[None])
        E_neg = expm(-1j * s[:, None, None] * b[None])
        vals = np.maximum(_norm(E_pos, norm), _norm(E_neg, norm))
    table = [(float(a), float(v)) for a, v in zip(s, vals)]
    if not np.all(np.isfinite(vals)) or vals.max() > OVERFLOW:
        return GrowthReport(float("inf"), float("inf"), float("inf"), float("inf"), "exponential", table)
    env = np.maximum.accumulate(vals)
    logs = np.log1p(s)
    tail = s >= s_max / 100
    alpha, c0, residual = _fit(logs[tail], np.log(env[tail]))
    octave = s >= s_max / 2
    slope, _, _ = _fit(logs[octave], np.log(env[octave]))
    if residual > EXP_RESIDUAL or slope - alpha > EXP_SLOPE_JUMP:
        verdict = "exponential"
    elif residual < POLY_RESIDUAL and abs(slope - alpha) <= SLOPE_WINDOW:
        verdict = "polynomial"
    else:
        verdict = "inconclusive"
    return GrowthReport(alpha, math.exp(c0), residual, slope, verdict, table)


# =============================================================================
# resolvent
# =============================================================================
def resolvent_norm(b, lam: complex, norm: str = "2") -> float:
    b = _as_matrix(b)
    if lam.imag == 0:
        raise SingularSolve("resolvent requested at a real point", point=str(lam))
    A = b - lam * np.eye(b.shape[0])
    try:
        R = np.linalg.solve(A, np.eye(b.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise SingularSolve("b - lambda is singular", point=str(lam)) from exc
    return float(_norm(R, norm))


def resolvent_scan(b, re_values: Sequence[float] | None = None,
                   near: Sequence[float] | None = None, far: Sequence[float] | None = None,
                   norm: str = "2") -> dict:
    """Resolvent norms off the real axis.

    gamma_near: blow-up exponent, ||R|| ~ C |Im l|^-gamma as Im l -> 0 (max over Re l).
    gamma_far:  decay exponent, ||R|| ~ C (1+|Im l|)^-gamma for large |Im l|.
    """
    b = _as_matrix(b)
    if re_values is None:
        re_values = sorted({round(float(x), 12) for x in np.linalg.eigvals(b).real})
    near = np.logspace(-6, -2, 9) if near is None else np.asarray(near, float)
    far = np.logspace(2, 5, 7) if far is None else np.asarray(far, float)
    table = []
    gamma_near = -np.inf
    gamma_far = np.inf
    for x in re_values:
        rn = np.array([resolvent_norm(b, complex(x, t), norm) for t in near])
        rf = np.array([resolvent_norm(b, complex(x, t), norm) for t in far])
        table += [(float(x), float(t), float(v)) for t, v in zip(near, rn)]
        table += [(float(x), float(t), float(v)) for t, v in zip(far, rf)]
        g_n = -_fit(np.log(near), np.log(rn))[0]
        g_f = -_fit(np.log1p(far), np.log(rf))[0]
        gamma_near = max(gamma_near, g_n)
        gamma_far = min(gamma_far, g_f)
    return {"gamma_near": float(gamma_near), "gamma_far": float(gamma_far),
            "re_values": [float(x) for x in re_values], "table": table}


# =============================================================================
# ordered functional calculus
# =============================================================================
def _check_nilpotent(b: np.ndarray) -> None:
    d = b.shape[0]
    P = np.linalg.matrix_power(b, d)
    scale = max(1.0, float(np.abs(b).max())) ** d
    if np.abs(P).max() > 1e-12 * scale:
        raise NotNilpotent("matrix is not nilpotent", residual=float(np.abs(P).max()))


def _value_at_zero(f, gamma: tuple, m: int) -> complex:
    g = cf.differentiate(f, gamma)
    return complex(np.asarray(cf.evaluate(g, np.zeros((1, m))))[0])


def ordered_fc_taylor(f, bs: Sequence) -> np.ndarray:
    """sum_alpha f^(alpha)(0)/alpha! b_1^alpha_1 ... b_m^alpha_m for nilpotent b_j."""
    bs = [_as_matrix(b) for b in bs]
    m = len(bs)
    d = bs[0].shape[0]
    for b in bs:
        _check_nilpotent(b)
    powers = [[np.linalg.matrix_power(b, n) for n in range(d)] for b in bs]
    out = np.zeros((d, d), dtype=complex)
    for alpha in itertools.product(range(d), repeat=m):
        M = np.eye(d, dtype=complex)
        for j, n in enumerate(alpha):
            M = M @ powers[j][n]
        if not M.any():
            continue
        out += _value_at_zero(f, alpha, m) / cf.multi_factorial(alpha) * M
    return _realify(out)


def _realify(M: np.ndarray) -> np.ndarray:
    return M.real if np.abs(M.imag).max(initial=0.0) < 1e-13 * max(1.0, np.abs(M).max(initial=0.0)) else M


def _check_real_spectrum(b: np.ndarray) -> None:
    ev = np.linalg.eigvals(b)
    bad = np.abs(ev.imag) > 1e-8 * (1 + np.abs(ev))
    if bad.any():
        raise NonRealSpectrum("spectrum is not real", eigenvalues=[str(z) for z in ev[bad]])


def gaussian_poly_fourier(exponents: Sequence[int], eps: float = 1.0) -> Callable:
    """Fourier transform of prod_j x_j^n_j exp(-eps |x|^2 / 2), convention f^(s) = int f e^{-isx}."""
    exponents = tuple(int(n) for n in exponents)
    c = math.sqrt(2 * math.pi / eps)
    scale = math.sqrt(2 * eps)

    def fhat(S: np.ndarray) -> np.ndarray:
        S = np.atleast_2d(S)
        out = np.ones(S.shape[0], dtype=complex)
        for j, n in enumerate(exponents):
            u = S[:, j] / scale
            coeffs = np.zeros(n + 1)
            coeffs[n] = 1.0
            out = out * c * (1j) ** n * (-1.0 / scale) ** n * H.hermval(u, coeffs) * np.exp(-u * u)
        return out

    return fhat


def _gaussian_factor_poly(n: int, r: int, eps: float) -> np.ndarray:
    """Coefficients of p with d^r/dx^r (x^n e^{-eps x^2/2}) = p(x) e^{-eps x^2/2}."""
    p = np.zeros(n + 1)
    p[n] = 1.0
    for _ in range(r):
        p = P.polysub(P.polyder(p), eps * P.polymulx(p)) if len(p) > 1 or p[0] else p
    return np.atleast_1d(p)


def gaussian_poly(exponents: Sequence[int], eps: float = 1.0) -> cf.SmoothFn:
    """prod_j x_j^n_j exp(-eps |x|^2 / 2) with exact partial derivatives."""
    exponents = tuple(int(n) for n in exponents)

    def deriv(gamma, X):
        X = np.atleast_2d(X)
        out = np.exp(-eps * (X ** 2).sum(axis=1) / 2)
        for j, (n, r) in enumerate(zip(exponents, gamma)):
            out = out * P.polyval(X[:, j], _gaussian_factor_poly(n, r, eps))
        return out

    return cf.smooth(lambda X: deriv((0,) * len(exponents), X), len(exponents), deriv,
                     name=f"gauss{list(exponents)}")


def _choose_S(fhat: Callable, m: int) -> float:
    ref = max(1.0, float(np.abs(fhat(np.zeros((1, m)))).max()))
    S = 2.0
    while S <= MAX_S:
        shell = np.linspace(S, 2 * S, 33)
        probes = []
        for j in range(m):
            for sgn in (1, -1):
                P = np.zeros((shell.size, m))
                P[:, j] = sgn * shell
                probes.append(P)
        P = np.zeros((shell.size, m))
        P[:, :] = shell[:, None]
        probes.append(P)
        if np.abs(fhat(np.vstack(probes))).max() < TAIL_TOL * ref:
            return S
        S *= 2
    raise TruncationBudgetExceeded("Fourier transform tail does not fall below tolerance", s_max=MAX_S)


def _gl(n: int, S: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return S * x, S * w


def _exp_stack(b: np.ndarray, s: np.ndarray) -> np.ndarray:
    return expm(1j * s[:, None, None] * b[None])


def _ordered_contract(W: np.ndarray, E: list) -> np.ndarray:
    """sum_{a_1..a_m} W[a] E_1[a_1] ... E_m[a_m]."""
    m = len(E)
    if m == 1:
        return _kernels.weighted_matrix_sum(W, E[0])
    if m == 2:
        return _kernels.ordered_sum_2d(W, E[0], E[1])
    # contract the last axis, then multiply from the left one axis at a time
    T = np.tensordot(W, E[-1], axes=([m - 1], [0]))  # (..., d, d)
    for j in range(m - 2, -1, -1):
        # T has axes a_1..a_{j+1}, d, d
        T = np.einsum("aij,...ajk->...ik", E[j], T)
    return T


def _fhat_on_grid(fhat: Callable, axes: list) -> np.ndarray:
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    return np.asarray(fhat(pts)).reshape(mesh[0].shape)


def _numeric_fourier(f: Callable, m: int, radius: Sequence[float], s_axes: list, nx: int = 512) -> np.ndarray:
    """f^ on the tensor grid s_axes for f supported in prod [-r_j, r_j] (Gauss-Legendre in x)."""
    xs, ws = zip(*(_gl(nx, r) for r in radius))
    mesh = np.meshgrid(*xs, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    F = np.asarray(f(pts), dtype=complex).reshape(mesh[0].shape)
    for j in range(m):
        F = np.moveaxis(F, j, -1) * ws[j]
        D = np.exp(-1j * np.outer(s_axes[j], xs[j]))  # (n_s, nx)
        F = np.moveaxis(F @ D.T, -1, j)
    return F


def _quadrature(build_terms: Callable, n_start: int = START_NODES,
                max_nodes: int = MAX_NODES, tol: float = QUAD_TOL) -> tuple[np.ndarray, int]:
    prev = None
    n = min(n_start, max_nodes)
    while n <= max_nodes:
        cur = build_terms(n)
        if prev is not None and np.abs(cur - prev).max() <= tol * max(1.0, np.abs(cur).max()):
            return cur, n
        prev = cur
        n *= 2
    raise TruncationBudgetExceeded("quadrature did not converge within the node budget", nodes=max_nodes)


def ordered_fc_quadrature(f: Callable | None, bs: Sequence, fhat: Callable | None = None,
                          support: Sequence[float] | None = None, S: float | None = None,
                          detail: bool = False, max_nodes: int = MAX_NODES):
    """(2 pi)^-m int f^(s) exp(i s_1 b_1) ... exp(i s_m b_m) ds on [-S, S]^m.

    Pass ``fhat`` (vectorized over (N, m) points) when the transform is known;
    otherwise f must vanish outside prod [-support_j, support_j] and is
    transformed numerically.
    """
    bs = [_as_matrix(b) for b in bs]
    m = len(bs)
    for b in bs:
        _check_real_spectrum(b)
    if fhat is None:
        if support is None:
            raise ValueError("numeric transforms need a support radius")
        if S is None:
            S = 256.0
    elif S is None:
        S = _choose_S(fhat, m)

    def build(n):
        s, w = _gl(n, S)
        axes = [s] * m
        vals = _fhat_on_grid(fhat, axes) if fhat is not None else _numeric_fourier(f, m, support, axes)
        W = vals
        for j in range(m):
            shape = [1] * m
            shape[j] = n
            W = W * w.reshape(shape)
        E = [_exp_stack(b, s) for b in bs]
        return _ordered_contract(W.astype(complex), E) / (2 * math.pi) ** m

    tol = QUAD_TOL if fhat is not None else NUMERIC_QUAD_TOL
    out, n = _quadrature(build, max_nodes=max_nodes, tol=tol)
    out = _realify(out)
    return (out, {"S": S, "nodes": n}) if detail else out


def weyl_fc_quadrature(f: Callable | None, bs: Sequence, fhat: Callable | None = None,
                       support: Sequence[float] | None = None, S: float | None = None,
                       detail: bool = False, max_nodes: int = MAX_NODES):
    """(2 pi)^-m int f^(s) exp(i sum_j s_j b_j) ds for pairwise commuting b_j."""
    bs = [_as_matrix(b) for b in bs]
    m = len(bs)
    for a, b in itertools.combinations(bs, 2):
        if np.abs(a @ b - b @ a).max() > 1e-12:
            raise NotCommuting("matrices do not commute", residual=float(np.abs(a @ b - b @ a).max()))
    for b in bs:
        _check_real_spectrum(b)
    if fhat is None:
        if support is None:
            raise ValueError("numeric transforms need a support radius")
        S = 256.0 if S is None else S
    elif S is None:
        S = _choose_S(fhat, m)
    stack = np.stack(bs)

    def build(n):
        s, w = _gl(n, S)
        mesh = np.meshgrid(*([s] * m), indexing="ij")
        pts = np.stack([g.ravel() for g in mesh], axis=1)
        wts = np.ones(len(pts))
        for g in np.meshgrid(*([w] * m), indexing="ij"):
            wts = wts * g.ravel()
        vals = np.asarray(fhat(pts)) if fhat is not None else \
            _numeric_fourier(f, m, support, [s] * m).ravel()
        E = expm(1j * np.einsum("nj,jab->nab", pts, stack))
        return _kernels.weighted_matrix_sum((wts * vals).astype(complex), E) / (2 * math.pi) ** m

    tol = QUAD_TOL if fhat is not None else NUMERIC_QUAD_TOL
    out, n = _quadrature(build, n_start=32, max_nodes=max_nodes, tol=tol)
    out = _realify(out)
    return (out, {"S": S, "nodes": n}) if detail else out


# =============================================================================
# polynomial symbols
# =============================================================================
def bump(radius: Sequence[float], margin: float = 1.0) -> Callable:
    """Smooth product cutoff: 1 on prod [-r_j, r_j], 0 outside prod [-r_j-margin, r_j+margin]."""
    radius = np.asarray(radius, float)

    def phi(u):
        out = np.zeros_like(u)
        pos = u > 0
        out[pos] = np.exp(-1.0 / u[pos])
        return out

    def step(u):  # 0 for u <= 0, 1 for u >= 1
        a, b = phi(u), phi(1 - u)
        return a / (a + b)

    def chi(X):
        X = np.atleast_2d(X)
        out = np.ones(X.shape[0])
        for j, r in enumerate(radius):
            out = out * step((r + margin - np.abs(X[:, j])) / margin)
        return out

    return chi


def ordered_monomial_value(p, bs: Sequence) -> np.ndarray:
    """Exact ordered substitution sum_alpha c_alpha b_1^alpha_1 ... b_m^alpha_m (float)."""
    bs = [_as_matrix(b) for b in bs]
    d = bs[0].shape[0]
    out = np.zeros((d, d), dtype=complex)
    exps, coeffs = cf.poly_arrays(p)
    for alpha, c in zip(exps, coeffs):
        M = np.eye(d, dtype=complex)
        for j, n in enumerate(alpha):
            M = M @ np.linalg.matrix_power(bs[j], int(n))
        out += c * M
    return _realify(out)


def polynomial_fc(p, bs: Sequence, protocol: str = "cutoff", weyl: bool = False,
                  eps: float = 0.05, levels: int = 4, max_nodes: int = MAX_NODES) -> np.ndarray:
    """Functional calculus of a polynomial symbol through the Fourier integral.

    cutoff: p times a bump equal to 1 on the box prod [-||b_j||, ||b_j||] (margin 1).
    damped: p exp(-eps |x|^2/2) at eps, eps/2, ..., Richardson-extrapolated to eps -> 0.
    """
    bs = [_as_matrix(b) for b in bs]
    run = weyl_fc_quadrature if weyl else ordered_fc_quadrature
    if protocol == "cutoff":
        radius = [float(np.linalg.norm(b, 2)) for b in bs]
        chi = bump(radius)
        f = lambda X: cf.eval_poly(p, X) * chi(X)
        return run(f, bs, support=[r + 1.0 for r in radius], max_nodes=max_nodes)
    if protocol != "damped":
        raise ValueError(f"unknown protocol {protocol!r}")
    exps, coeffs = cf.poly_arrays(p)
    rows = []
    for t in range(levels):
        e = eps / 2 ** t
        acc = 0
        for alpha, c in zip(exps, coeffs):
            acc = acc + c * run(None, bs, fhat=gaussian_poly_fourier(alpha, e), max_nodes=max_nodes)
        rows.append(np.asarray(acc, dtype=complex))
    # Richardson in eps with ratio 2
    for level in range(1, levels):
        fac = 2 ** level
        rows = [(fac * rows[i + 1] - rows[i]) / (fac - 1) for i in range(len(rows) - 1)]
    return _realify(rows[0])
