"""Acceptance suite: one PASS/FAIL line per criterion, at the required tolerances and time limits.

Run standalone with ``python3 tests/test_acceptance.py`` or through pytest, where the
lines are collected into the terminal summary.
"""
from __future__ import annotations

import itertools
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from sympy import QQ_I

sys.path.insert(0, str(Path(__file__).resolve().parent))

from ncsmooth import calculus as calc  # noqa: E402
from ncsmooth.demo import best_rows, demo_e2_blowup, exact_identity  # noqa: E402
from ncsmooth.grid import CompactBox  # noqa: E402
from ncsmooth.lie_core import LieAlgebra  # noqa: E402
from ncsmooth.ncfunc import NCFunctionElement, to_uea  # noqa: E402
from ncsmooth.pbw import (element_from_dict, element_to_dict, format_element, parse_element,  # noqa: E402
                          poly_ring, shift, uea_multiply)
from ncsmooth.reps import catalog, shifted_symbol, tilde_pi  # noqa: E402
from ncsmooth.seminorm_lab import shift_identity, verify_domination  # noqa: E402
from ncsmooth.sheaf import LocalSection, Mismatch, OpenRegion, glue, restrict  # noqa: E402

from oracles import as_fracs, element, oracle_product, random_poly  # noqa: E402

RESULTS: dict[int, str] = {}


def report(number: int, title: str, ok: bool, seconds: float, limit: float, detail: str) -> bool:
    within = seconds < limit
    verdict = "PASS" if ok and within else "FAIL"
    line = f"criterion {number:2d} {verdict}  {title}: {detail} ({seconds:.1f}s, limit {limit:.0f}s)"
    RESULTS[number] = line
    print(line)
    return ok and within


def timed(fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - t0


def random_terms(rng: random.Random, m: int, degree: int, count: int) -> dict:
    out = {}
    for _ in range(count):
        alpha = [0] * m
        for _ in range(rng.randint(0, degree)):
            alpha[rng.randrange(m)] += 1
        out[tuple(alpha)] = Fraction(rng.randint(-5, 5) or 1, rng.randint(1, 4))
    return out


# -- 1 ----------------------------------------------------------------------------------
def pbw_oracle():
    rng = random.Random(1)
    bad = []
    for name in ["abelian(3)", "af1", "heisenberg", "e2"]:
        L = catalog(name).algebra
        for _ in range(100):
            raw = [random_terms(rng, L.m, 4, 2) for _ in range(3)]
            a, b, c = (element(L, t) for t in raw)
            ab = uea_multiply(a, b)
            if uea_multiply(ab, c) != uea_multiply(a, uea_multiply(b, c)):
                bad.append((name, "assoc"))
            if as_fracs(ab) != oracle_product(raw[0], raw[1], L):
                bad.append((name, "oracle"))
            if parse_element(format_element(ab), L) != ab or element_from_dict(element_to_dict(ab), L) != ab:
                bad.append((name, "round trip"))
    return not bad, f"400 triples over 4 algebras, {len(bad)} failures"


# -- 2 ----------------------------------------------------------------------------------
def e2_identity():
    rng = random.Random(2)
    R = poly_ring(QQ_I, 1)
    (l,) = R.gens
    fails = 0
    for _ in range(50):
        deg = rng.randint(0, 8)
        f = sum((R(QQ_I.convert(Fraction(rng.randint(-9, 9), rng.randint(1, 5)))) * l ** j
                 for j in range(deg + 1)), R.zero)
        fails += not exact_identity(f)
    return fails == 0, f"50 random polynomials of degree <= 8, {fails} mismatches"


# -- 3 ----------------------------------------------------------------------------------
def af1_formula():
    S = catalog("af1").system
    A = S.algebra
    R = poly_ring(A.K, 1)
    rng = random.Random(3)
    exact_fail = 0
    worst = 0.0
    for q in range(5):
        pi = S.rep_for((q,))
        for _ in range(6):
            fs = [random_poly(rng, A.K, 1, 4) for _ in range(q + 1)]
            a = NCFunctionElement(A, {(n,): f for n, f in enumerate(fs)}, 1)
            F = tilde_pi(pi, to_uea(a), 1)
            for i in range(q + 1):
                for j in range(q + 1):
                    want = shift(fs[j - i], [q - i]) if j >= i else R.zero
                    exact_fail += F.entry(i, j) != want
            for l in (0, 1):
                f = fs[-1]
                lhs, rhs = shift_identity(S, f, (q,), CompactBox.of((-1, 2)), l)
                worst = max(worst, abs(lhs - rhs))
    ok = exact_fail == 0 and worst < 1e-6
    return ok, f"q <= 4 entry mismatches {exact_fail}, worst shift-identity gap {worst:.1e}"


# -- 4 ----------------------------------------------------------------------------------
def sparse_kron_power(M: dict, d: int, q: int) -> dict:
    """q-fold Kronecker power of a d x d matrix given as {(i, j): c}."""
    out = {(0, 0): 1}
    for _ in range(q):
        out = {(i * d + a, j * d + b): c * x for (i, j), c in out.items() for (a, b), x in M.items()}
    return out


def heisenberg_system():
    from ncsmooth.reps import build_adapted_system
    S = build_adapted_system(catalog("heisenberg").algebra)
    problems = []
    if not all(pi.nilpotent_image for pi in S.reps.values()):
        problems.append("image not nilpotent")
    if any(c != 0 for v in S.mu.values() for c in v):
        problems.append("mu != 0")
    for q in range(4):
        pi = S.rep_for((q,))
        if q and pi.of_monomial((0, 0, q)).is_zero_matrix:
            problems.append(f"pi_{q}(e^{q}) = 0")
        for a in range(q + 1, 6):
            if not pi.of_monomial((0, 0, a)).is_zero_matrix:
                problems.append(f"pi_{q}(e3^{a}) != 0")
    e3 = S.reps[2].mats[2].to_dok()
    d0 = S.reps[2].d
    for q in range(1, 5):
        pi = S.rep_for((q,))
        if pi.power(2, q).to_dok() != {ij: math.factorial(q) * c for ij, c in sparse_kron_power(e3, d0, q).items()}:
            problems.append(f"power formula q={q}")
    return not problems, "nilpotent, mu = 0, leading-monomial and power formulas exact" if not problems \
        else "; ".join(problems)


# -- 5 ----------------------------------------------------------------------------------
def shift_identity_check():
    rng = random.Random(5)
    checked = fails = 0
    for name in ["af1", "heisenberg", "tri(2)", "tri(3)"]:
        S = catalog(name).system
        n = S.m - S.k
        for beta in itertools.product(range(3), repeat=n):
            if sum(beta) > 2:
                continue
            pi = S.rep_for(beta)
            for _ in range(50):
                f = random_poly(rng, S.algebra.K, S.k, 3)
                a = NCFunctionElement(S.algebra, {beta: f}, S.k)
                fails += tilde_pi(pi, to_uea(a), S.k) != shifted_symbol(S, f, beta, pi)
                checked += 1
    return fails == 0, f"{checked} symbols, {fails} mismatches"


# -- 6 ----------------------------------------------------------------------------------
def domination():
    rng = random.Random(6)
    checks = fails = 0
    for name in ["af1", "heisenberg", "tri(2)", "tri(3)"]:
        S = catalog(name).system
        n, k = S.m - S.k, S.k
        betas = [b for b in itertools.product(range(3), repeat=n) if sum(b) <= 2]
        boxes = [CompactBox.of(*[(-1, 1)] * k), CompactBox.of(*[(0, 2)] * k)]
        for _ in range(20):
            a = NCFunctionElement(S.algebra, {b: random_poly(rng, S.algebra.K, k, 3) for b in betas}, k)
            for beta in betas:
                for box in boxes:
                    for l in (0, 1):
                        checks += 1
                        fails += not verify_domination(a, beta, box, l, S)["pass"]
    return fails == 0, f"{checks} inequalities, {fails} violations"


# -- 7 ----------------------------------------------------------------------------------
def growth():
    notes = []
    for d in range(2, 6):
        r = calc.exp_growth_scan(np.eye(d, k=1))
        if r.verdict != "polynomial" or abs(r.alpha - (d - 1)) > 0.2:
            notes.append(f"jordan {d}: {r.verdict} {r.alpha:.2f}")
    if calc.exp_growth_scan(np.array([[0.0, -1.0], [1.0, 0.0]])).verdict != "exponential":
        notes.append("rotation not exponential")
    rng = np.random.default_rng(7)
    for _ in range(20):
        b = np.triu(rng.integers(-3, 4, size=(4, 4)).astype(float))
        if calc.exp_growth_scan(b).verdict != "polynomial":
            notes.append("upper-triangular")
    for _ in range(10):
        D = np.diag(rng.integers(-2, 3, size=2).astype(float))
        N = np.triu(rng.integers(-2, 3, size=(2, 2)).astype(float), 1)
        b = np.block([[D, rng.integers(-2, 3, size=(2, 2)).astype(float)], [np.zeros((2, 2)), N]])
        if calc.exp_growth_scan(b).verdict != "polynomial":
            notes.append("split extension")
    return not notes, "Jordan d<=5, rotation, 20 triangular and 10 split extensions as expected" if not notes \
        else "; ".join(notes)


# -- 8 ----------------------------------------------------------------------------------
def ordered_calculus():
    errs = {}
    g = calc.gaussian_poly_fourier((0,))
    errs["diag 2x2"] = np.abs(calc.ordered_fc_quadrature(None, [np.diag([0.0, 1.0])], fhat=g)
                              - np.diag([1.0, math.exp(-0.5)])).max()
    errs["diag 3x3"] = np.abs(calc.ordered_fc_quadrature(None, [np.diag([-1.0, 0.5, 2.0])], fhat=g)
                              - np.diag(np.exp(-np.array([1.0, 0.25, 4.0]) / 2))).max()
    for d in (2, 3):
        for n in (0, 1, 2):
            N = np.eye(d, k=1)
            q = calc.ordered_fc_quadrature(None, [N], fhat=calc.gaussian_poly_fourier((n,)))
            errs[f"taylor {d}x{d} n={n}"] = np.abs(q - calc.ordered_fc_taylor(calc.gaussian_poly((n,)), [N])).max()
    b1, b2 = np.diag([0.0, 1.0, -0.5]), np.diag([1.0, 0.5, 0.0])
    g2 = calc.gaussian_poly_fourier((0, 0), 2.0)
    o = calc.ordered_fc_quadrature(None, [b1, b2], fhat=g2)
    w = calc.weyl_fc_quadrature(None, [b1, b2], fhat=g2)
    errs["weyl 3x3"] = max(np.abs(o - w).max(),
                           np.abs(o - np.diag(np.exp(-np.diag(b1) ** 2 - np.diag(b2) ** 2))).max())
    c1, c2 = np.eye(2, k=1), 0.5 * np.eye(2, k=1)
    errs["weyl 2x2"] = np.abs(calc.weyl_fc_quadrature(None, [c1, c2], fhat=calc.gaussian_poly_fourier((1, 0)))
                              - calc.ordered_fc_taylor(calc.gaussian_poly((1, 0)), [c1, c2])).max()
    errs["flat 3x3"] = np.abs(calc.ordered_fc_quadrature(None, [np.eye(3, k=1)],
                                                         fhat=calc.gaussian_poly_fourier((3,)))).max()
    worst = max(errs, key=errs.get)
    return errs[worst] < 1e-6, f"{len(errs)} cases, worst {worst} at {errs[worst]:.1e}"


# -- 9 ----------------------------------------------------------------------------------
def sheaf_suite():
    H = catalog("heisenberg").algebra
    HC = LieAlgebra.from_dict({**H.to_dict(), "mode": "complex"})
    rng = random.Random(9)
    problems = []
    for holo, L in ((False, H), (True, HC)):
        rest = ",0:1" * (3 if holo else 1)
        V = OpenRegion.parse("0:3" + rest, holo)
        W = OpenRegion.parse("1:2" + rest, holo)
        X = OpenRegion.parse("1:3/2" + rest, holo)
        mode = "holomorphic" if holo else None
        for trial in range(20):
            terms = {}
            for beta in [(0,), (1,), (2,)]:
                f = random_poly(rng, L.K, 2, 2)
                if holo:
                    f = f + random_poly(rng, L.K, 2, 2) * L.K(0, 1)
                terms[beta] = f
            a = NCFunctionElement(L, terms, 2, mode=mode)
            s = LocalSection(a, V)
            if restrict(s, V) != s or restrict(restrict(s, W), X) != restrict(s, X):
                problems.append("presheaf law")
            cuts = sorted(Fraction(rng.randint(1, 8), 3) for _ in range(1 + trial % 2))
            cover, lo = [], Fraction(0)
            for i, c in enumerate(cuts + [Fraction(3)]):
                hi = min(c + Fraction(1, 3), 3) if i < len(cuts) else c
                cover.append(OpenRegion.parse(f"{lo}:{hi}{rest}", holo))
                lo = max(c - Fraction(1, 3), 0)
            sections = [LocalSection(a, U) for U in cover]
            glued = glue(cover, sections)
            if not isinstance(glued, LocalSection) or any(restrict(glued, U) != t for U, t in zip(cover, sections)):
                problems.append("glue")
            bad = dict(terms)
            beta = rng.choice(list(bad))
            bad[beta] = bad[beta] + poly_ring(L.K, 2).one
            broken = sections[:-1] + [LocalSection(NCFunctionElement(L, bad, 2, mode=mode), cover[-1])]
            res = glue(cover, broken)
            if not (isinstance(res, Mismatch) and res.beta == beta and res.witness):
                problems.append("mismatch not detected")
    return not problems, "20 families per mode glue, restrict back and reject injected mismatches" \
        if not problems else "; ".join(sorted(set(problems)))


# -- 10 ---------------------------------------------------------------------------------
def e2_demo():
    rows = demo_e2_blowup((2, 4, 8))
    best = best_rows(rows)
    parts, ok = [], True
    for m in (2, 4, 8):
        good = [r for r in rows if r["m"] == m and r["fit_ok"] and r["relative_gap"] < 0.1]
        ok &= bool(good)
        r = best[m]
        parts.append(f"m={m}: best residual {r['residual']:.1e} (deg {r['degree']}), "
                     f"sup|g| {r['sup_g']:.3f} vs {r['sup_target']:.3f}")
    sups = [best[m]["sup_target"] for m in (2, 4, 8)]
    ok &= sups[0] < sups[1] < sups[2]
    return ok, "; ".join(parts)


CRITERIA = [
    (1, "PBW oracle", pbw_oracle, 10),
    (2, "e2 commutation identity", e2_identity, 5),
    (3, "af1 matrix formula", af1_formula, 10),
    (4, "Heisenberg system", heisenberg_system, 30),
    (5, "shift identity", shift_identity_check, 10),
    (6, "domination", domination, 60),
    (7, "growth scans", growth, 60),
    (8, "ordered calculus", ordered_calculus, 60),
    (9, "sheaf", sheaf_suite, 20),
    (10, "e2 blow-up demo", e2_demo, 30),
]


@pytest.mark.parametrize("number,title,fn,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, limit):
    ok, detail, seconds = timed(fn)
    assert report(number, title, ok, seconds, limit, detail), RESULTS[number]


if __name__ == "__main__":
    status = 0
    for number, title, fn, limit in CRITERIA:
        ok, detail, seconds = timed(fn)
        status |= not report(number, title, ok, seconds, limit, detail)
    sys.exit(status)
