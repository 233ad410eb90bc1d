"""Compact boxes and the adaptive grid estimator for suprema."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

START_POINTS = 17
MAX_POINTS = 2 ** 12
REL_TOL = 1e-3
NODE_BUDGET = 2 ** 21


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


@dataclass(frozen=True)
class CompactBox:
    """Product of closed intervals [lo_i, hi_i] with rational endpoints."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(_frac(x) for x in self.lo)
        hi = tuple(_frac(x) for x in self.hi)
        if len(lo) != len(hi):
            raise ValueError("endpoint lists differ in length")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError("empty box")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def of(cls, *intervals: Sequence) -> "CompactBox":
        return cls(tuple(a for a, _ in intervals), tuple(b for _, b in intervals))

    @classmethod
    def parse(cls, text: str) -> "CompactBox":
        """``"0:1,-1:2"`` -> [0,1] x [-1,2]."""
        lo, hi = [], []
        for part in text.split(","):
            a, b = part.split(":")
            lo.append(Fraction(a))
            hi.append(Fraction(b))
        return cls(tuple(lo), tuple(hi))

    @property
    def k(self) -> int:
        return len(self.lo)

    def shifted(self, mu: Sequence) -> "CompactBox":
        mu = [_frac(m) for m in mu]
        return CompactBox(tuple(a + m for a, m in zip(self.lo, mu)),
                          tuple(b + m for b, m in zip(self.hi, mu)))

    def contains_box(self, other: "CompactBox") -> bool:
        return all(a <= c and d <= b for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def nodes(self, n: int) -> np.ndarray:
        axes = [np.linspace(float(a), float(b), n) for a, b in zip(self.lo, self.hi)]
        if not axes:
            return np.zeros((1, 0))
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=1)

    def __str__(self) -> str:
        return " x ".join(f"[{a},{b}]" for a, b in zip(self.lo, self.hi))


@dataclass(frozen=True)
class SupEstimate:
    """Grid maximum; a lower bound for the true supremum."""

    value: float
    points_per_axis: int
    converged: bool


def refinement_levels(k: int):
    n = START_POINTS
    while n <= MAX_POINTS and n ** max(k, 1) <= NODE_BUDGET:
        yield n
        n = 2 * n - 1


def grid_sup(evaluate: Callable[[np.ndarray], np.ndarray], box: CompactBox) -> SupEstimate:
    """Refine nested grids (17, 33, 65, ... points/axis) until the max changes by < 1e-3 relatively."""
    prev = None
    n_used = START_POINTS
    for n in refinement_levels(box.k):
        vals = np.asarray(evaluate(box.nodes(n)), dtype=float)
        cur = float(vals.max()) if vals.size else 0.0
        n_used = n
        if prev is not None and abs(cur - prev) <= REL_TOL * max(abs(cur), 1e-300):
            return SupEstimate(cur, n, True)
        if prev is not None and cur == 0.0 and prev == 0.0:
            return SupEstimate(cur, n, True)
        prev = cur
    return SupEstimate(prev if prev is not None else 0.0, n_used, False)


def grid_sup_joint(jobs: Sequence[tuple[Callable, CompactBox]]) -> list[SupEstimate]:
    """Several suprema refined on a common number of points per axis.

    Boxes must share a dimension. Comparing quantities evaluated on one grid keeps
    node-wise inequalities intact after taking maxima.
    """
    if not jobs:
        return []
    k = jobs[0][1].k
    if any(box.k != k for _, box in jobs):
        raise ValueError("boxes differ in dimension")
    prev = None
    n_used = START_POINTS
    cur = [0.0] * len(jobs)
    for n in refinement_levels(k):
        cur = []
        for evaluate, box in jobs:
            vals = np.asarray(evaluate(box.nodes(n)), dtype=float)
            cur.append(float(vals.max()) if vals.size else 0.0)
        n_used = n
        if prev is not None and all(abs(c - p) <= REL_TOL * max(abs(c), 1e-300) or c == p == 0.0
                                    for c, p in zip(cur, prev)):
            return [SupEstimate(c, n, True) for c in cur]
        prev = cur
    return [SupEstimate(c, n_used, False) for c in cur]
