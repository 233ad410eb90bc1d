"""Local sections over unions of open boxes: restriction, products and gluing."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import coeffs as cf
from .errors import DomainMismatch, NotACover, NotNilpotent, NotSubregion
from .ncfunc import HOLOMORPHIC, NCFunctionElement, nc_multiply

PROBE_POINTS = 9
PROBE_TOL = 1e-9


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


def _as_real(X: np.ndarray) -> np.ndarray:
    """Complex points (N, k) -> real points (N, 2k) ordered Re z1, Im z1, Re z2, ..."""
    X = np.atleast_2d(X)
    if not np.iscomplexobj(X):
        return X
    out = np.empty((X.shape[0], 2 * X.shape[1]))
    out[:, 0::2] = X.real
    out[:, 1::2] = X.imag
    return out


def _as_complex(Y: np.ndarray) -> np.ndarray:
    return Y[:, 0::2] + 1j * Y[:, 1::2]


@dataclass(frozen=True)
class OpenBox:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(_frac(x) for x in self.lo)
        hi = tuple(_frac(x) for x in self.hi)
        if len(lo) != len(hi) or any(a >= b for a, b in zip(lo, hi)):
            raise ValueError("open box needs lo < hi on every axis")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, p: Sequence[Fraction]) -> bool:
        return all(a < x < b for a, x, b in zip(self.lo, p, self.hi))

    def intersect(self, other: "OpenBox") -> "OpenBox | None":
        lo = tuple(max(a, c) for a, c in zip(self.lo, other.lo))
        hi = tuple(min(b, d) for b, d in zip(self.hi, other.hi))
        if any(a >= b for a, b in zip(lo, hi)):
            return None
        return OpenBox(lo, hi)

    def inside(self, other: "OpenBox") -> bool:
        return all(c <= a and b <= d for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def center(self) -> tuple:
        return tuple((a + b) / 2 for a, b in zip(self.lo, self.hi))

    def __str__(self) -> str:
        return " x ".join(f"({a},{b})" for a, b in zip(self.lo, self.hi))


class OpenRegion:
    """Finite union of open boxes with rational corners.

    In holomorphic mode a region in C^k is stored as boxes in R^{2k}
    (coordinates Re z1, Im z1, Re z2, ...).
    """

    def __init__(self, boxes: Sequence[OpenBox], complex_vars: bool = False):
        boxes = list(boxes)
        if not boxes:
            raise ValueError("empty region")
        dims = {len(b.lo) for b in boxes}
        if len(dims) != 1:
            raise ValueError("boxes differ in dimension")
        self.complex_vars = complex_vars
        self.boxes = tuple(_normalize(boxes))

    @classmethod
    def of(cls, *boxes, complex_vars: bool = False) -> "OpenRegion":
        """``OpenRegion.of([(0, 1), (0, 2)], ...)``: each box a list of (lo, hi) per axis."""
        return cls([OpenBox(tuple(a for a, _ in b), tuple(c for _, c in b)) for b in boxes], complex_vars)

    @classmethod
    def parse(cls, text: str, complex_vars: bool = False) -> "OpenRegion":
        """``"0:1,0:2;1:3,0:2"``: boxes separated by ';', axes by ','."""
        boxes = []
        for part in text.split(";"):
            axes = [tuple(Fraction(v) for v in ax.split(":")) for ax in part.split(",")]
            boxes.append(axes)
        return cls.of(*boxes, complex_vars=complex_vars)

    @property
    def dim(self) -> int:
        return len(self.boxes[0].lo)

    @property
    def k(self) -> int:
        return self.dim // 2 if self.complex_vars else self.dim

    def contains_point(self, p: Sequence) -> bool:
        p = tuple(_frac(x) for x in p)
        return any(b.contains(p) for b in self.boxes)

    def contains_points(self, X: np.ndarray) -> np.ndarray:
        Y = _as_real(np.asarray(X))
        out = np.zeros(Y.shape[0], dtype=bool)
        for b in self.boxes:
            lo = np.array([float(a) for a in b.lo])
            hi = np.array([float(a) for a in b.hi])
            out |= np.all((Y > lo) & (Y < hi), axis=1)
        return out

    def _cells(self, other: "OpenRegion"):
        """Representative points of the common cell decomposition (breakpoints and midpoints)."""
        axes = []
        for ax in range(self.dim):
            pts = sorted({b.lo[ax] for b in self.boxes + other.boxes}
                         | {b.hi[ax] for b in self.boxes + other.boxes})
            reps = list(pts) + [(a + b) / 2 for a, b in zip(pts, pts[1:])]
            axes.append(reps)
        return itertools.product(*axes)

    def contains_region(self, other: "OpenRegion") -> bool:
        if other.dim != self.dim:
            return False
        if all(any(b.inside(c) for c in self.boxes) for b in other.boxes):
            return True
        # membership is constant on each cell of the joint grid, so these points decide it
        return all(self.contains_point(p) for p in self._cells(other) if other.contains_point(p))

    def __eq__(self, other) -> bool:
        return isinstance(other, OpenRegion) and self.contains_region(other) and other.contains_region(self)

    def __hash__(self):
        return hash(self.boxes)

    def intersect(self, other: "OpenRegion") -> "OpenRegion | None":
        parts = [x for a in self.boxes for b in other.boxes if (x := a.intersect(b)) is not None]
        return OpenRegion(parts, self.complex_vars) if parts else None

    def union(self, other: "OpenRegion") -> "OpenRegion":
        return OpenRegion(list(self.boxes) + list(other.boxes), self.complex_vars)

    def probe_points(self, n: int = PROBE_POINTS) -> np.ndarray:
        """Interior grid points of every box (complex when the region lives in C^k)."""
        pts = []
        for b in self.boxes:
            axes = [np.linspace(float(a), float(c), n + 2)[1:-1] for a, c in zip(b.lo, b.hi)]
            mesh = np.meshgrid(*axes, indexing="ij")
            pts.append(np.stack([g.ravel() for g in mesh], axis=1))
        Y = np.vstack(pts)
        return _as_complex(Y) if self.complex_vars else Y

    def witness(self):
        c = self.boxes[0].center()
        if self.complex_vars:
            return [complex(float(c[2 * i]), float(c[2 * i + 1])) for i in range(self.k)]
        return [str(x) for x in c]

    def __str__(self) -> str:
        return " u ".join(str(b) for b in self.boxes)

    def __repr__(self) -> str:
        return f"OpenRegion({self})"


def _normalize(boxes: list) -> list:
    """Drop boxes inside others; merge pairs that differ on one axis and overlap there."""
    boxes = list(dict.fromkeys(boxes))
    changed = True
    while changed:
        changed = False
        for a, b in itertools.permutations(boxes, 2):
            if a.inside(b):
                boxes.remove(a)
                changed = True
                break
            diff = [i for i in range(len(a.lo)) if (a.lo[i], a.hi[i]) != (b.lo[i], b.hi[i])]
            if len(diff) == 1:
                i = diff[0]
                if max(a.lo[i], b.lo[i]) < min(a.hi[i], b.hi[i]):
                    lo = list(a.lo)
                    hi = list(a.hi)
                    lo[i] = min(a.lo[i], b.lo[i])
                    hi[i] = max(a.hi[i], b.hi[i])
                    boxes.remove(a)
                    boxes.remove(b)
                    boxes.append(OpenBox(tuple(lo), tuple(hi)))
                    changed = True
                    break
    return sorted(boxes, key=lambda b: (b.lo, b.hi))


# -- sections ---------------------------------------------------------------------
class LocalSection:
    """Element of the local algebra over ``domain``."""

    def __init__(self, element: NCFunctionElement, domain: OpenRegion):
        if domain.k != element.k:
            raise DomainMismatch("domain dimension does not match the number of variables")
        if (element.mode == HOLOMORPHIC) != domain.complex_vars:
            raise DomainMismatch("holomorphic sections need complex domains and vice versa")
        self.element = element
        self.domain = domain
        self.level = "exact"

    @property
    def terms(self) -> dict:
        return self.element.terms

    def __mul__(self, other: "LocalSection") -> "LocalSection":
        return local_multiply(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalSection) and self.domain == other.domain and self.element == other.element

    def __repr__(self) -> str:
        return f"LocalSection({self.element!r} on {self.domain})"


def local_multiply(a: LocalSection, b: LocalSection) -> LocalSection:
    if not a.element.L.is_nilpotent:
        raise NotNilpotent("local algebras are defined for nilpotent algebras")
    if a.domain != b.domain:
        raise DomainMismatch("sections live on different domains", left=str(a.domain), right=str(b.domain))
    return LocalSection(nc_multiply(a.element, b.element), a.domain)


def restrict(a: LocalSection, W: OpenRegion) -> LocalSection:
    if not a.domain.contains_region(W):
        raise NotSubregion("restriction target is not inside the domain", domain=str(a.domain), target=str(W))
    out = LocalSection(a.element, W)
    out.level = a.level
    return out


def character(a: LocalSection, x: Sequence) -> complex:
    """Point evaluation of the beta = 0 coefficient (a multiplicative functional)."""
    x = np.asarray([x], dtype=complex if a.domain.complex_vars else float)
    if not a.domain.contains_points(x)[0]:
        raise DomainMismatch("evaluation point outside the domain")
    zero = (0,) * (a.element.L.m - a.element.k)
    f = a.element.terms.get(zero)
    return 0.0 if f is None else complex(np.asarray(cf.evaluate(f, x))[0])


@dataclass
class Mismatch:
    """Two sections disagree on an overlap."""

    pair: tuple
    beta: tuple
    witness: list
    level: str
    difference: float | None = None

    def to_dict(self) -> dict:
        return {"error": "mismatch", "pair": [p + 1 for p in self.pair], "beta": list(self.beta),
                "witness": [str(w) for w in self.witness], "level": self.level,
                "difference": self.difference}


def _compare(f, g, overlap: OpenRegion):
    """(equal, level, witness, difference) for two coefficients on a region."""
    if cf.is_polynomial(f) and cf.is_polynomial(g):
        if f == g:
            return True, "exact", None, None
        X = overlap.probe_points()
        diff = np.abs(cf.evaluate(f, X) - cf.evaluate(g, X))
        i = int(np.argmax(diff))
        w = list(X[i]) if diff[i] > 0 else overlap.witness()
        return False, "exact", w, float(diff[i])
    X = overlap.probe_points()
    diff = np.abs(cf.evaluate(f, X) - cf.evaluate(g, X))
    i = int(np.argmax(diff))
    if diff[i] <= PROBE_TOL:
        return True, "numeric", None, float(diff[i])
    return False, "numeric", list(X[i]), float(diff[i])


def glue(cover: Sequence[OpenRegion], sections: Sequence[LocalSection],
         V: OpenRegion | None = None) -> LocalSection | Mismatch:
    """Glue compatible sections over a cover of V (V defaults to the union of the cover)."""
    if len(cover) != len(sections) or not cover:
        raise NotACover("one section per cover region required")
    union = cover[0]
    for U in cover[1:]:
        union = union.union(U)
    V = union if V is None else V
    if not union.contains_region(V):
        raise NotACover("regions do not cover the target", target=str(V))
    for U, s in zip(cover, sections):
        if s.domain != U:
            raise DomainMismatch("section domain differs from its cover region", region=str(U))
        if not V.contains_region(U):
            raise NotACover("cover region sticks out of the target", region=str(U))
    first = sections[0].element
    level = "exact"
    for i, j in itertools.combinations(range(len(cover)), 2):
        overlap = cover[i].intersect(cover[j])
        if overlap is None:
            continue
        a, b = sections[i].element, sections[j].element
        for beta in sorted(set(a.terms) | set(b.terms)):
            ok, lvl, w, diff = _compare(a.coefficient(beta), b.coefficient(beta), overlap)
            if lvl == "numeric":
                level = "numeric"
            if not ok:
                return Mismatch((i, j), beta, w, lvl, diff)
    terms = {}
    for beta in sorted({b for s in sections for b in s.terms}):
        coeffs = [s.element.coefficient(beta) for s in sections]
        if all(cf.is_polynomial(f) for f in coeffs) and all(f == coeffs[0] for f in coeffs):
            terms[beta] = coeffs[0]
        else:
            terms[beta] = cf.Piecewise(list(zip(cover, coeffs)), first.k)
            level = "numeric"
    N = min(s.element.N for s in sections)
    glued = LocalSection(NCFunctionElement(first.L, terms, first.k, N, first.mode), V)
    glued.level = level
    # the glued section restricts back to every input
    for U, s in zip(cover, sections):
        back = restrict(glued, U)
        for beta in set(back.terms) | set(s.terms):
            ok, *_ = _compare(back.element.coefficient(beta), s.element.coefficient(beta), U)
            assert ok, "glued section does not restrict back"
    return glued
