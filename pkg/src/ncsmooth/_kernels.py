"""Numeric hot loops, compiled with numba when available.

Set NCSMOOTH_NO_NUMBA=1 to force the pure-numpy implementations.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("NCSMOOTH_NO_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised by the fallback test
    numba = None
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


# -- numpy versions --------------------------------------------------------------
def poly_eval_np(exps: np.ndarray, coeffs: np.ndarray, X: np.ndarray) -> np.ndarray:
    out = np.zeros(X.shape[0], dtype=np.result_type(coeffs, X))
    for t in range(exps.shape[0]):
        term = np.full(X.shape[0], coeffs[t], dtype=out.dtype)
        for v in range(exps.shape[1]):
            if exps[t, v]:
                term = term * X[:, v] ** exps[t, v]
        out += term
    return out


def max_row_sum_sup_np(V: np.ndarray) -> float:
    if V.size == 0:
        return 0.0
    return float(np.abs(V).sum(axis=2).max())


def packed_row_sum_sup_np(monos: np.ndarray, C: np.ndarray, rows: np.ndarray, d: int,
                          X: np.ndarray) -> float:
    best = 0.0
    for start in range(0, X.shape[0], 4096):
        Xc = X[start:start + 4096]
        V = np.ones((monos.shape[0], Xc.shape[0]), dtype=np.result_type(Xc, float))
        for v in range(monos.shape[1]):
            V *= Xc[:, v][None, :] ** monos[:, v][:, None]
        sums = np.zeros((d, Xc.shape[0]))
        np.add.at(sums, rows, np.abs(C @ V))
        best = max(best, float(sums.max()))
    return best


def weighted_matrix_sum_np(w: np.ndarray, E: np.ndarray) -> np.ndarray:
    return np.einsum("n,nij->ij", w, E)


def ordered_sum_2d_np(W: np.ndarray, E1: np.ndarray, E2: np.ndarray) -> np.ndarray:
    inner = np.einsum("ab,bjk->ajk", W, E2)
    return np.einsum("aij,ajk->ik", E1, inner)


# -- numba versions --------------------------------------------------------------
if HAVE_NUMBA:
    @numba.njit(cache=True)
    def _poly_eval_nb(exps, coeffs, X, out):
        n, k = X.shape
        T = exps.shape[0]
        for i in range(n):
            acc = out[i] * 0
            for t in range(T):
                term = coeffs[t] + out[i] * 0
                for v in range(k):
                    e = exps[t, v]
                    x = X[i, v]
                    for _ in range(e):
                        term = term * x
                acc += term
            out[i] = acc
        return out

    @numba.njit(cache=True)
    def _max_row_sum_sup_nb(V):
        n, d, _ = V.shape
        best = 0.0
        for a in range(n):
            for i in range(d):
                s = 0.0
                for j in range(d):
                    s += abs(V[a, i, j])
                if s > best:
                    best = s
        return best

    @numba.njit(cache=True, fastmath=True)
    def _packed_row_sum_sup_nb(monos, CT, rows, d, X):
        M, k = monos.shape
        E = CT.shape[1]
        n = X.shape[0]
        B = 1024
        V = np.empty((B, M))
        sums = np.empty(d)
        best = 0.0
        for start in range(0, n, B):
            m = min(n, start + B) - start
            for a in range(m):
                for t in range(M):
                    p = 1.0
                    for v in range(k):
                        for _ in range(monos[t, v]):
                            p *= X[start + a, v]
                    V[a, t] = p
            vals = np.dot(V[:m], CT)
            for a in range(m):
                sums[:] = 0.0
                for e in range(E):
                    sums[rows[e]] += abs(vals[a, e])
                for i in range(d):
                    if sums[i] > best:
                        best = sums[i]
        return best

    @numba.njit(cache=True)
    def _weighted_matrix_sum_nb(w, E):
        n, d, _ = E.shape
        out = np.zeros((d, d), dtype=np.complex128)
        for a in range(n):
            for i in range(d):
                for j in range(d):
                    out[i, j] += w[a] * E[a, i, j]
        return out

    @numba.njit(cache=True)
    def _ordered_sum_2d_nb(W, E1, E2):
        n1, n2 = W.shape
        d = E1.shape[1]
        out = np.zeros((d, d), dtype=np.complex128)
        inner = np.zeros((d, d), dtype=np.complex128)
        for a in range(n1):
            inner[:, :] = 0
            for b in range(n2):
                wab = W[a, b]
                for j in range(d):
                    for k in range(d):
                        inner[j, k] += wab * E2[b, j, k]
            for i in range(d):
                for k in range(d):
                    s = 0j
                    for j in range(d):
                        s += E1[a, i, j] * inner[j, k]
                    out[i, k] += s
        return out


def poly_eval(exps: np.ndarray, coeffs: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Evaluate sum_t coeffs[t] * prod_v X[:, v]**exps[t, v]."""
    X = np.ascontiguousarray(X)
    if not HAVE_NUMBA or exps.shape[0] == 0:
        return poly_eval_np(exps, coeffs, X)
    dtype = np.result_type(coeffs, X, np.float64)
    out = np.zeros(X.shape[0], dtype=dtype)
    return _poly_eval_nb(np.ascontiguousarray(exps, dtype=np.int64),
                         np.ascontiguousarray(coeffs, dtype=dtype),
                         np.ascontiguousarray(X, dtype=dtype), out)


def max_row_sum_sup(V: np.ndarray) -> float:
    """max over nodes of the max-row-sum norm of V[n]."""
    if not HAVE_NUMBA or V.size == 0:
        return max_row_sum_sup_np(V)
    return float(_max_row_sum_sup_nb(np.ascontiguousarray(V)))


def packed_row_sum_sup(monos: np.ndarray, C: np.ndarray, rows: np.ndarray, d: int,
                       X: np.ndarray) -> float:
    """max over X and i of sum_e [rows[e] == i] |(C @ monomials(X))[e]| for real data."""
    if X.shape[0] == 0 or C.shape[0] == 0:
        return 0.0
    if not HAVE_NUMBA:
        return packed_row_sum_sup_np(monos, C, rows, d, X)
    return float(_packed_row_sum_sup_nb(np.ascontiguousarray(monos, dtype=np.int64),
                                        np.ascontiguousarray(C.T, dtype=np.float64),
                                        np.ascontiguousarray(rows, dtype=np.int64), d,
                                        np.ascontiguousarray(X, dtype=np.float64)))


def weighted_matrix_sum(w: np.ndarray, E: np.ndarray) -> np.ndarray:
    if not HAVE_NUMBA:
        return weighted_matrix_sum_np(w, E)
    return _weighted_matrix_sum_nb(np.ascontiguousarray(w, dtype=np.complex128),
                                   np.ascontiguousarray(E, dtype=np.complex128))


def ordered_sum_2d(W: np.ndarray, E1: np.ndarray, E2: np.ndarray) -> np.ndarray:
    """sum_{a,b} W[a,b] E1[a] @ E2[b]."""
    if not HAVE_NUMBA:
        return ordered_sum_2d_np(W, E1, E2)
    return _ordered_sum_2d_nb(np.ascontiguousarray(W, dtype=np.complex128),
                              np.ascontiguousarray(E1, dtype=np.complex128),
                              np.ascontiguousarray(E2, dtype=np.complex128))
