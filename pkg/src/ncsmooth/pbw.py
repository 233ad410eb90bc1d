"""Exact arithmetic in the universal enveloping algebra in PBW coordinates."""
from __future__ import annotations

import json
from functools import lru_cache
from typing import Sequence

from sympy.polys.rings import PolyElement, ring

from .errors import AlgebraMismatch, ParseError
from .lie_core import LieAlgebra
from .scalars import format_scalar, parse_scalar

MultiIndex = tuple


# -- polynomials in the complement variables ------------------------------------
@lru_cache(maxsize=None)
def poly_ring(K, k: int):
    """Polynomial ring K[l1..lk]; with k == 0 a one-variable ring is used for constants."""
    names = ",".join(f"l{i + 1}" for i in range(max(k, 1)))
    R = ring(names, K)[0]
    return R


def shift(f: PolyElement, mu: Sequence) -> PolyElement:
    """f(lambda + mu) by exact expansion."""
    R = f.ring
    if all(not c for c in mu):
        return f
    return f.compose([(g, g + R.domain.convert(c)) for g, c in zip(R.gens, mu) if c])


def derivative(f: PolyElement, gamma: Sequence[int]) -> PolyElement:
    for i, n in enumerate(gamma):
        for _ in range(n):
            f = f.diff(f.ring.gens[i])
    return f


# -- multi-index helpers -------------------------------------------------------
def colex_compare(a: Sequence[int], b: Sequence[int]) -> int:
    """-1 if a precedes b, 0 if equal, 1 if a follows b (last differing slot decides)."""
    if len(a) != len(b):
        raise ValueError("multi-indices of different length")
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return -1 if x < y else 1
    return 0


def colex_key(a: Sequence[int]) -> tuple:
    return tuple(reversed(a))


def word_of(alpha: Sequence[int]) -> list[int]:
    return [i for i, n in enumerate(alpha) for _ in range(n)]


def _inversions(word: Sequence[int]) -> int:
    return sum(1 for i in range(len(word)) for j in range(i + 1, len(word)) if word[i] > word[j])


# -- straightening engine --------------------------------------------------------
class _Engine:
    """Memoized products e^alpha * e_j in PBW form for one algebra."""

    def __init__(self, L: LieAlgebra):
        self.L = L
        self.m = L.m
        self._gen: dict = {}
        self._mono: dict = {}

    def times_gen(self, alpha: MultiIndex, j: int) -> dict:
        key = (alpha, j)
        hit = self._gen.get(key)
        if hit is not None:
            return hit
        t = max((i for i, n in enumerate(alpha) if n), default=-1)
        if j >= t:
            out = {alpha[:j] + (alpha[j] + 1,) + alpha[j + 1:]: self.L.K.one}
        else:
            # e^alpha e_j = (e^alpha' e_j) e_t + e^alpha' [e_t, e_j]
            head = alpha[:t] + (alpha[t] - 1,) + alpha[t + 1:]
            out: dict = {}
            for g, c in self.times_gen(head, j).items():
                for g2, c2 in self.times_gen(g, t).items():
                    out[g2] = out.get(g2, 0) + c * c2
            for kk, ck in self.L.sparse.get((t, j), {}).items():
                for g2, c2 in self.times_gen(head, kk).items():
                    out[g2] = out.get(g2, 0) + ck * c2
            out = {g: c for g, c in out.items() if c}
        self._gen[key] = out
        return out

    def times_mono(self, alpha: MultiIndex, beta: MultiIndex) -> dict:
        key = (alpha, beta)
        hit = self._mono.get(key)
        if hit is not None:
            return hit
        cur = {alpha: self.L.K.one}
        for j in word_of(beta):
            nxt: dict = {}
            for g, c in cur.items():
                for g2, c2 in self.times_gen(g, j).items():
                    nxt[g2] = nxt.get(g2, 0) + c * c2
            cur = {g: c for g, c in nxt.items() if c}
        self._mono[key] = cur
        return cur


_ENGINES: dict = {}


def engine(L: LieAlgebra) -> _Engine:
    eng = _ENGINES.get(id(L))
    if eng is None or eng.L is not L:
        eng = _Engine(L)
        _ENGINES[id(L)] = eng
    return eng


# -- elements --------------------------------------------------------------------
class UEAElement:
    """Finite linear combination of ordered monomials e^alpha."""

    __slots__ = ("L", "k", "terms")

    def __init__(self, L: LieAlgebra, terms: dict | None = None, k: int | None = None):
        self.L = L
        self.k = L.split if k is None else k
        K = L.K
        self.terms = {tuple(a): K.convert(c) for a, c in (terms or {}).items() if c}

    # constructors
    @classmethod
    def one(cls, L: LieAlgebra, k: int | None = None) -> "UEAElement":
        return cls(L, {(0,) * L.m: L.K.one}, k)

    @classmethod
    def gen(cls, L: LieAlgebra, i: int, k: int | None = None) -> "UEAElement":
        return cls(L, {tuple(1 if t == i else 0 for t in range(L.m)): L.K.one}, k)

    @classmethod
    def monomial(cls, L: LieAlgebra, alpha: Sequence[int], c=1, k: int | None = None) -> "UEAElement":
        return cls(L, {tuple(alpha): L.K.convert(c)}, k)

    def _same(self, other: "UEAElement") -> None:
        if other.L is not self.L and not other.L.same_as(self.L):
            raise AlgebraMismatch("elements belong to different algebras")

    def __add__(self, other: "UEAElement") -> "UEAElement":
        self._same(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, self.L.K.zero) + c
        return UEAElement(self.L, out, self.k)

    def __neg__(self) -> "UEAElement":
        return UEAElement(self.L, {a: -c for a, c in self.terms.items()}, self.k)

    def __sub__(self, other: "UEAElement") -> "UEAElement":
        return self + (-other)

    def scale(self, c) -> "UEAElement":
        c = self.L.K.convert(c)
        return UEAElement(self.L, {a: c * x for a, x in self.terms.items()}, self.k)

    def __mul__(self, other):
        if isinstance(other, UEAElement):
            return uea_multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other) -> bool:
        return isinstance(other, UEAElement) and self.L.same_as(other.L) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms)))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=-1)

    def n_degree(self, alpha: MultiIndex) -> int:
        return n_degree(self.L, alpha, self.k)

    def __repr__(self) -> str:
        return f"UEAElement({format_element(self)})"

    def __str__(self) -> str:
        return format_element(self)


def n_degree(L: LieAlgebra, alpha: Sequence[int], k: int | None = None) -> int:
    """Filtration degree of a monomial: exponents of nilradical generators weighted by LCS depth.

    With an abelian nilradical every weight is 1 and this is the plain degree in e_{k+1..m}.
    """
    k = L.split if k is None else k
    w = L.nil_weights
    return sum(n * max(w[i], 1) for i, n in enumerate(alpha) if i >= k)


def uea_multiply(a: UEAElement, b: UEAElement) -> UEAElement:
    a._same(b)
    eng = engine(a.L)
    out: dict = {}
    zero = a.L.K.zero
    for al, ca in a.terms.items():
        for be, cb in b.terms.items():
            c = ca * cb
            for g, cg in eng.times_mono(al, be).items():
                out[g] = out.get(g, zero) + c * cg
    return UEAElement(a.L, out, a.k)


def normal_order(word: Sequence[int], L: LieAlgebra, k: int | None = None) -> UEAElement:
    """PBW form of e_{w1} e_{w2} ... by leftmost-adjacent-swap rewriting (0-based letters).

    Each rewrite e_a e_b -> e_b e_a + [e_a, e_b] (a > b) strictly lowers
    (length, inversions) lexicographically; the assertion below checks it.
    """
    K = L.K
    m = L.m
    out: dict = {}
    stack = [(tuple(word), K.one)]
    while stack:
        w, c = stack.pop()
        pos = next((i for i in range(len(w) - 1) if w[i] > w[i + 1]), None)
        if pos is None:
            alpha = [0] * m
            for x in w:
                alpha[x] += 1
            alpha = tuple(alpha)
            out[alpha] = out.get(alpha, K.zero) + c
            continue
        metric = (len(w), _inversions(w))
        a, b = w[pos], w[pos + 1]
        swapped = w[:pos] + (b, a) + w[pos + 2:]
        assert (len(swapped), _inversions(swapped)) < metric
        stack.append((swapped, c))
        for kk, ck in L.sparse.get((a, b), {}).items():
            shorter = w[:pos] + (kk,) + w[pos + 2:]
            assert len(shorter) < metric[0]
            stack.append((shorter, c * ck))
    return UEAElement(L, out, k)


def phi(f: PolyElement, L: LieAlgebra, k: int | None = None) -> UEAElement:
    """Ordered-monomial map: lambda^gamma -> e^gamma (gamma padded with zeros)."""
    k = L.split if k is None else k
    nv = f.ring.ngens
    terms = {}
    for mono, c in f.items():
        if nv > L.m:
            raise ValueError("too many variables")
        alpha = tuple(mono) + (0,) * (L.m - nv)
        if k is not None and nv > k and any(alpha[k:nv]) and nv != L.m:
            raise ValueError("polynomial uses variables beyond the split")
        terms[alpha] = c
    return UEAElement(L, terms, k)


def truncate_n_degree(a: UEAElement, N: int) -> UEAElement:
    return UEAElement(a.L, {al: c for al, c in a.terms.items() if n_degree(a.L, al, a.k) <= N}, a.k)


def project_below(a: UEAElement, beta: Sequence[int]) -> UEAElement:
    """Keep terms whose nilradical exponent strictly precedes beta in colex order."""
    k = a.k
    return UEAElement(a.L, {al: c for al, c in a.terms.items() if colex_compare(al[k:], beta) < 0}, k)


def split_terms(a: UEAElement) -> dict:
    """{beta: polynomial in l1..lk} with a = sum Phi(f_beta) e^beta."""
    k = a.k
    R = poly_ring(a.L.K, k)
    out: dict = {}
    for al, c in a.terms.items():
        beta = al[k:]
        lam = al[:k] if k else (0,)
        out.setdefault(beta, R.zero)
        out[beta] = out[beta] + R({tuple(lam): c})
    return {b: f for b, f in out.items() if f}


# -- text format -----------------------------------------------------------------
def _coeff_text(c, K) -> str:
    s = format_scalar(c, K)
    # gaussian rationals with both parts need parentheses
    return f"({s})" if getattr(c, "x", 0) and getattr(c, "y", 0) else s


def _mono_text(alpha: Sequence[int], labels: Sequence[str]) -> str:
    parts = []
    for i, n in enumerate(alpha):
        if n == 1:
            parts.append(labels[i])
        elif n > 1:
            parts.append(f"{labels[i]}^{n}")
    return "*".join(parts)


def element_sort_key(alpha: Sequence[int]) -> tuple:
    return (-sum(alpha), tuple(-x for x in alpha))


def format_element(a: UEAElement) -> str:
    if not a.terms:
        return "0"
    K = a.L.K
    pieces = []
    for alpha in sorted(a.terms, key=element_sort_key):
        c = a.terms[alpha]
        mono = _mono_text(alpha, a.L.labels)
        negative = False
        if K.__class__.__name__ == "RationalField" or getattr(c, "y", 0) == 0:
            re_c = c if not hasattr(c, "x") else c.x
            negative = re_c < 0
            mag = -c if negative else c
        else:
            mag = c
        ctext = _coeff_text(mag, K)
        if not mono:
            body = ctext
        elif ctext == "1":
            body = mono
        else:
            body = f"{ctext}*{mono}"
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


def parse_element(text: str, L: LieAlgebra, k: int | None = None) -> UEAElement:
    """Parse sums of coefficient*word terms; words in any order are straightened."""
    K = L.K
    labels = {name: i for i, name in enumerate(L.labels)}
    s = text.strip()
    if not s:
        raise ParseError("empty element")
    # split into signed terms, respecting parentheses
    terms, depth, cur, sign = [], 0, "", 1
    i = 0
    while i < len(s):
        ch = s[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and cur.strip() and not cur.rstrip().endswith(("*", "^", "/")):
            terms.append((sign, cur))
            sign, cur = (1 if ch == "+" else -1), ""
        elif depth == 0 and ch in "+-" and not cur.strip():
            sign = sign * (1 if ch == "+" else -1)
        else:
            cur += ch
        i += 1
    terms.append((sign, cur))
    total = UEAElement(L, {}, k)
    for sgn, body in terms:
        body = body.strip()
        if not body:
            raise ParseError(f"empty term in {text!r}")
        coeff = K.one
        word: list[int] = []
        for factor in _split_factors(body):
            factor = factor.strip()
            if factor.startswith("(") and factor.endswith(")"):
                coeff *= parse_scalar(factor[1:-1], K)
                continue
            name, caret, power = factor.partition("^")
            name, power = name.strip(), power.strip()
            if caret and not power.isdigit():
                raise ParseError(f"bad exponent in {factor!r}", factor=factor)
            if name in labels:
                p = int(power) if caret else 1
                word.extend([labels[name]] * p)
            else:
                if power:
                    raise ParseError(f"cannot raise scalar {factor!r}")
                try:
                    coeff *= parse_scalar(name, K)
                except ParseError as exc:
                    raise ParseError(f"unknown factor {factor!r}", factor=factor) from exc
        term = normal_order(word, L, k).scale(coeff * sgn)
        total = total + term
    return total


def _split_factors(body: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


def element_to_dict(a: UEAElement) -> dict:
    K = a.L.K
    return {"split": a.k,
            "terms": [{"exp": list(al), "c": format_scalar(a.terms[al], K)}
                      for al in sorted(a.terms, key=element_sort_key)]}


def element_from_dict(data: dict, L: LieAlgebra) -> UEAElement:
    try:
        terms = {tuple(int(x) for x in t["exp"]): parse_scalar(t["c"], L.K) for t in data["terms"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed element JSON: {exc}") from exc
    for al in terms:
        if len(al) != L.m or min(al, default=0) < 0:
            raise ParseError("exponent vector has wrong length or sign", exp=list(al))
    return UEAElement(L, terms, data.get("split"))


def element_to_json(a: UEAElement) -> str:
    return json.dumps(element_to_dict(a))
