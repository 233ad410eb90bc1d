"""Coefficient functions: exact polynomials or smooth callables with derivative oracles.

Polynomials are sympy ``PolyElement`` objects over QQ or QQ_I. Smooth functions
are ``SmoothFn`` trees whose nodes know how to differentiate themselves.
"""
from __future__ import annotations

import itertools
import math
from typing import Callable, Sequence

import numpy as np
from sympy.polys.rings import PolyElement

from . import _kernels
from .scalars import to_complex


def is_polynomial(f) -> bool:
    return isinstance(f, PolyElement)


def poly_arrays(f: PolyElement) -> tuple[np.ndarray, np.ndarray]:
    """Exponent matrix and float/complex coefficient vector of a polynomial."""
    items = sorted(f.items())
    k = f.ring.ngens
    exps = np.array([m for m, _ in items], dtype=np.int64).reshape(len(items), k)
    vals = [to_complex(c) for _, c in items]
    if all(v.imag == 0 for v in vals):
        coeffs = np.array([v.real for v in vals], dtype=np.float64)
    else:
        coeffs = np.array(vals, dtype=np.complex128)
    return exps, coeffs


def eval_poly(f: PolyElement, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(X)
    k = f.ring.ngens
    if X.shape[1] < k:
        X = np.hstack([X, np.zeros((X.shape[0], k - X.shape[1]))])
    exps, coeffs = poly_arrays(f)
    if exps.shape[0] == 0:
        return np.zeros(X.shape[0])
    return _kernels.poly_eval(exps, coeffs, X[:, :k])


def pack_polys(fs: Sequence[PolyElement], k: int) -> tuple[np.ndarray, np.ndarray]:
    """Shared monomial table (M, k) and coefficient matrix (len(fs), M) for several polynomials."""
    index: dict = {}
    rows = []
    for f in fs:
        exps, coeffs = poly_arrays(f)
        rows.append([(index.setdefault(tuple(e), len(index)), c) for e, c in zip(exps, coeffs)])
    complex_coeffs = any(isinstance(c, complex) or np.iscomplexobj(c) for r in rows for _, c in r)
    C = np.zeros((len(fs), len(index)), dtype=complex if complex_coeffs else float)
    for i, r in enumerate(rows):
        for j, c in r:
            C[i, j] = c
    monos = np.array(list(index), dtype=np.int64).reshape(len(index), k)
    return monos, C


def eval_packed(monos: np.ndarray, C: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Values (len(C), N) of packed polynomials at the rows of X."""
    X = np.atleast_2d(X)
    N, k = X.shape[0], monos.shape[1]
    if monos.shape[0] == 0:
        return np.zeros((C.shape[0], N), dtype=C.dtype)
    V = np.ones((monos.shape[0], N), dtype=np.result_type(X, float))
    for v in range(k):
        top = int(monos[:, v].max())
        if top == 0:
            continue
        powers = np.empty((top + 1, N), dtype=V.dtype)
        powers[0] = 1
        for e in range(1, top + 1):
            powers[e] = powers[e - 1] * X[:, v]
        V *= powers[monos[:, v]]
    return C @ V


def multi_indices(k: int, order: int):
    """All gamma in Z_+^k with |gamma| == order, in lexicographic order."""
    if k == 0:
        if order == 0:
            yield ()
        return
    for gamma in itertools.product(range(order + 1), repeat=k):
        if sum(gamma) == order:
            yield gamma


def multi_factorial(gamma: Sequence[int]) -> int:
    out = 1
    for g in gamma:
        out *= math.factorial(g)
    return out


class SmoothFn:
    """Smooth function of k real (or complex) variables with a derivative oracle."""

    k: int
    approximate = False  # True when some derivative falls back to finite differences

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return self.value(np.atleast_2d(np.asarray(X)))

    def value(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, gamma: Sequence[int]) -> "SmoothFn":
        raise NotImplementedError

    # arithmetic builds expression trees
    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)


class OracleFn(SmoothFn):
    """User callable; ``deriv(gamma, X)`` gives partials, otherwise central differences."""

    def __init__(self, func: Callable, k: int, deriv: Callable | None = None, name: str = "f",
                 gamma: tuple | None = None, scale: float = 1.0):
        self.func = func
        self.k = k
        self.deriv = deriv
        self.name = name
        self.gamma = tuple(gamma) if gamma else (0,) * k
        self.scale = scale
        self.approximate = deriv is None and any(self.gamma)

    def value(self, X):
        if not any(self.gamma):
            return np.asarray(self.func(X))
        if self.deriv is not None:
            return np.asarray(self.deriv(self.gamma, X))
        return _central_difference(self.func, self.gamma, X, self.scale)

    def derivative(self, gamma):
        g = tuple(a + b for a, b in zip(self.gamma, gamma))
        return OracleFn(self.func, self.k, self.deriv, self.name, g, self.scale)


def smooth(func: Callable, k: int, deriv: Callable | None = None, name: str = "f",
           scale: float = 1.0) -> SmoothFn:
    return OracleFn(func, k, deriv, name, None, scale)


FD_STEP = 2.0 ** -17


def _central_difference(func, gamma, X, scale):
    """Iterated central differences with h = 2^-17 * scale per axis."""
    h = FD_STEP * scale
    terms = [(1.0, np.zeros(len(gamma)))]
    for axis, n in enumerate(gamma):
        for _ in range(n):
            new = []
            for c, off in terms:
                for sgn in (1.0, -1.0):
                    o = off.copy()
                    o[axis] += sgn * h
                    new.append((c * sgn / (2 * h), o))
            terms = new
    acc = 0.0
    for c, off in terms:
        acc = acc + c * np.asarray(func(X + off))
    return acc


class PolyFn(SmoothFn):
    """A polynomial viewed as a smooth function."""

    def __init__(self, f: PolyElement):
        self.f = f
        self.k = f.ring.ngens

    def value(self, X):
        return eval_poly(self.f, X)

    def derivative(self, gamma):
        from .pbw import derivative
        return PolyFn(derivative(self.f, gamma))


class Sum(SmoothFn):
    def __init__(self, parts: Sequence):
        self.parts = list(parts)
        self.k = self.parts[0].k
        self.approximate = any(getattr(p, "approximate", False) for p in self.parts)

    def value(self, X):
        out = 0.0
        for p in self.parts:
            out = out + p.value(X)
        return out

    def derivative(self, gamma):
        return Sum([p.derivative(gamma) for p in self.parts])


class Product(SmoothFn):
    def __init__(self, a: SmoothFn, b: SmoothFn):
        self.a, self.b = a, b
        self.k = a.k
        self.approximate = a.approximate or b.approximate

    def value(self, X):
        return self.a.value(X) * self.b.value(X)

    def derivative(self, gamma):
        # Leibniz rule
        parts = []
        for g1 in itertools.product(*(range(n + 1) for n in gamma)):
            g2 = tuple(n - a for n, a in zip(gamma, g1))
            c = 1
            for n, a in zip(gamma, g1):
                c *= math.comb(n, a)
            term = Product(self.a.derivative(g1), self.b.derivative(g2))
            parts.append(Scaled(c, term) if c != 1 else term)
        return Sum(parts) if len(parts) > 1 else parts[0]


class Scaled(SmoothFn):
    def __init__(self, c, f: SmoothFn):
        self.c = complex(c) if isinstance(c, complex) or np.iscomplexobj(c) else float(c)
        self.f = f
        self.k = f.k
        self.approximate = f.approximate

    def value(self, X):
        return self.c * self.f.value(X)

    def derivative(self, gamma):
        return Scaled(self.c, self.f.derivative(gamma))


class Shifted(SmoothFn):
    """x -> f(x + mu)."""

    def __init__(self, f: SmoothFn, mu: Sequence[float]):
        self.f = f
        self.mu = np.asarray(mu, dtype=float)
        self.k = f.k
        self.approximate = f.approximate

    def value(self, X):
        return self.f.value(X + self.mu)

    def derivative(self, gamma):
        return Shifted(self.f.derivative(gamma), self.mu)


class Piecewise(SmoothFn):
    """Dispatch on the region containing each point (used by gluing)."""

    def __init__(self, pieces: Sequence[tuple], k: int):
        self.pieces = list(pieces)  # (region, coefficient)
        self.k = k
        self.approximate = any(not is_polynomial(f) and f.approximate for _, f in self.pieces)

    def value(self, X):
        X = np.atleast_2d(X)
        out = np.full(X.shape[0], np.nan, dtype=complex)
        for region, f in self.pieces:
            mask = region.contains_points(X) & np.isnan(out)
            if mask.any():
                out[mask] = evaluate(f, X[mask])
        if np.all(np.imag(out[~np.isnan(out)]) == 0):
            return out.real
        return out

    def derivative(self, gamma):
        return Piecewise([(r, differentiate(f, gamma)) for r, f in self.pieces], self.k)


# -- uniform helpers over both kinds ---------------------------------------------
def as_smooth(f) -> SmoothFn:
    return PolyFn(f) if is_polynomial(f) else f


def evaluate(f, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X))
    if is_polynomial(f):
        return eval_poly(f, X)
    return np.broadcast_to(np.asarray(f.value(X)), (X.shape[0],))


def differentiate(f, gamma: Sequence[int]):
    if not any(gamma):
        return f
    if is_polynomial(f):
        from .pbw import derivative
        return derivative(f, gamma)
    return f.derivative(tuple(gamma))


def add(f, g):
    if is_polynomial(f) and is_polynomial(g):
        return f + g
    return Sum([as_smooth(f), as_smooth(g)])


def mul(f, g):
    if is_polynomial(f) and is_polynomial(g):
        return f * g
    return Product(as_smooth(f), as_smooth(g))


def scale(c, f):
    if is_polynomial(f):
        return f * f.ring.domain.convert(c)
    return Scaled(to_complex(c).real if to_complex(c).imag == 0 else to_complex(c), f)


def is_zero(f) -> bool:
    return is_polynomial(f) and not f


def max_abs_on(f, X: np.ndarray) -> float:
    v = evaluate(f, X)
    return float(np.max(np.abs(v))) if v.size else 0.0
