import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncsmooth import coeffs as cf
from ncsmooth.calculus import gaussian_poly
from ncsmooth.errors import AlgebraMismatch, ModeMismatch, SmoothUnsupported
from ncsmooth.grid import CompactBox
from ncsmooth.ncfunc import (NCFunctionElement, coefficient_seminorm, commutation_rule, from_uea,
                             nc_from_dict, nc_multiply, nc_seminorm, nc_to_dict, nc_to_json, to_uea,
                             transport_uea)
from ncsmooth.pbw import UEAElement, parse_element, poly_ring, shift, uea_multiply
from ncsmooth.reps import catalog
from ncsmooth.lie_core import LieAlgebra

from oracles import element, poly_from_list, polys_1d, sparse_terms

HEIS = catalog("heisenberg").algebra
AF1 = catalog("af1").algebra
E2 = catalog("e2").algebra


def R(L, k=None):
    return poly_ring(L.K, L.split if k is None else k)


def test_from_uea_heisenberg():
    a = from_uea(parse_element("e2*e1", HEIS))
    l1, l2 = R(HEIS).gens
    assert a.terms == {(0,): l1 * l2, (1,): -R(HEIS).one}
    assert a.N == 1  # the nilradical span(e3) is abelian, so e3 has degree 1
    assert from_uea(parse_element("e2*e1", HEIS), N=0).terms == {(0,): l1 * l2}


def test_product_of_generators():
    l1, l2 = R(HEIS).gens
    x = NCFunctionElement(HEIS, {(0,): l2}, N=2)
    y = NCFunctionElement(HEIS, {(0,): l1}, N=2)
    assert (x * y).terms == {(0,): l1 * l2, (1,): -R(HEIS).one}
    assert (x * y - y * x).terms == {(1,): -R(HEIS).one}
    assert (x * NCFunctionElement.one(HEIS, N=2)) == x


def test_e2_commutation_example():
    (lam,) = R(E2).gens
    out = commutation_rule(E2, 1, lam ** 2)
    assert out.terms == {(1, 0): lam ** 2 - 1, (0, 1): -2 * lam}


def test_round_trip_with_uea():
    a = parse_element("e1^2*e3 - 3*e2 + e1*e2*e3^2", HEIS)
    assert to_uea(from_uea(a)) == a


@pytest.mark.parametrize("name", ["heisenberg", "af1", "e2", "tri(2)"])
@given(data=st.data())
@settings(max_examples=30)
def test_product_matches_enveloping_algebra(name, data):
    L = catalog(name).algebra
    k = L.split
    N = data.draw(st.integers(0, 3))
    a = element(L, data.draw(sparse_terms(L.m, 3)), k)
    b = element(L, data.draw(sparse_terms(L.m, 3)), k)
    got = nc_multiply(from_uea(a, k, N), from_uea(b, k, N))
    assert got == from_uea(uea_multiply(a, b), k, N)


@pytest.mark.parametrize("name", ["heisenberg", "e2"])
@given(data=st.data())
@settings(max_examples=30)
def test_truncation_commutes_with_product(name, data):
    L = catalog(name).algebra
    k = L.split
    a = from_uea(element(L, data.draw(sparse_terms(L.m, 3)), k), k, 4)
    b = from_uea(element(L, data.draw(sparse_terms(L.m, 3)), k), k, 4)
    M = data.draw(st.integers(0, 3))
    assert (a * b).truncate(M) == a.truncate(M) * b.truncate(M)


@given(coeffs=polys_1d(5))
@settings(max_examples=50)
def test_af1_shift_law(coeffs):
    f = poly_from_list(AF1.K, coeffs)
    out = commutation_rule(AF1, 1, f)
    assert out.terms.get((1,), R(AF1).zero) == shift(f, [-1])
    assert set(out.terms) <= {(1,)}


@given(coeffs=polys_1d(4), var=st.integers(0, 1))
@settings(max_examples=30)
def test_heisenberg_central_generator_commutes(coeffs, var):
    f = poly_from_list(HEIS.K, coeffs, 2, var)
    out = commutation_rule(HEIS, 2, f)
    assert out.terms == ({(1,): f} if f else {})


@given(coeffs=polys_1d(4))
@settings(max_examples=30)
def test_e2_rule_against_rotation_formula(coeffs):
    f = poly_from_list(E2.K, coeffs)
    lhs = uea_multiply(UEAElement.gen(E2, 1), to_uea(NCFunctionElement(E2, {(0, 0): f})))
    assert to_uea(commutation_rule(E2, 1, f)) == lhs


def test_smooth_needs_nilpotent_algebra():
    g = gaussian_poly((0,))
    a = NCFunctionElement(AF1, {(0,): g}, N=1)
    with pytest.raises(SmoothUnsupported):
        a * a
    with pytest.raises(SmoothUnsupported):
        to_uea(a)


def _taylor_gaussian(R2, degree):
    l1, l2 = R2.gens
    out = R2.zero
    for i in range(degree // 2 + 1):
        for j in range(degree // 2 + 1 - i):
            c = Fraction((-1) ** (i + j), 2 ** (i + j) * math.factorial(i) * math.factorial(j))
            out += R2(R2.domain.convert(c)) * l1 ** (2 * i) * l2 ** (2 * j)
    return out


def _times(f, p):
    """Monomial p times f, as polynomial or smooth product."""
    return f * p if not hasattr(f, "value") else cf.mul(cf.as_smooth(p), f)


@pytest.mark.slow
def test_heisenberg_smooth_product_matches_taylor():
    R2 = R(HEIS)
    l1, l2 = R2.gens
    T = _taylor_gaussian(R2, 24)
    G = gaussian_poly((0, 0))
    def build(g, lin):
        return NCFunctionElement(HEIS, {(0,): _times(g, lin), (1,): g}, N=2)
    smooth = build(G, l1) * build(G, l2)
    poly = build(T, l1) * build(T, l2)
    assert set(smooth.terms) == set(poly.terms) == {(0,), (1,), (2,)}
    xs = np.linspace(-1, 1, 17)
    X = np.array([(a, b) for a in xs for b in xs])
    for beta in poly.terms:
        got = cf.evaluate(smooth.terms[beta], X)
        want = cf.eval_poly(poly.terms[beta], X)
        assert np.max(np.abs(got - want)) < 1e-6


def test_smooth_product_jet_at_origin():
    # derivatives at 0 of the smooth product agree with the polynomial product of Taylor jets
    R2 = R(HEIS)
    T = _taylor_gaussian(R2, 8)
    G = gaussian_poly((0, 0))
    a_s = NCFunctionElement(HEIS, {(0,): G, (1,): G}, N=2)
    a_p = NCFunctionElement(HEIS, {(0,): T, (1,): T}, N=2)
    s, p = a_s * a_s, a_p * a_p
    origin = np.zeros((1, 2))
    for beta in p.terms:
        for gamma in [(0, 0), (1, 0), (0, 2), (1, 1), (2, 2)]:
            got = cf.evaluate(cf.differentiate(s.terms[beta], gamma), origin)[0]
            want = cf.eval_poly(cf.differentiate(p.terms[beta], gamma), origin)[0]
            assert got == pytest.approx(want, abs=1e-9)


def test_coefficient_seminorm_examples():
    (lam,) = R(AF1).gens
    total, ests = coefficient_seminorm(lam, CompactBox.of((0, 1)), 0)
    assert total == pytest.approx(1.0) and len(ests) == 1
    assert coefficient_seminorm(lam ** 2, CompactBox.of((0, 1)), 1)[0] == pytest.approx(2.0)
    assert coefficient_seminorm(lam, CompactBox.of((0, 1)), 2)[0] == 0.0
    a = NCFunctionElement(AF1, {(1,): lam ** 2})
    assert nc_seminorm(a, (1,), CompactBox.of((-2, 1)), 0) == pytest.approx(4.0)
    assert nc_seminorm(a, (0,), CompactBox.of((-2, 1)), 0) == 0.0


def test_json_round_trip_and_opaque():
    a = from_uea(parse_element("1/2*e1^2*e3 - e2", HEIS), N=2)
    back = nc_from_dict(nc_to_dict(a), HEIS)
    assert back == a and back.N == 2
    assert nc_to_json(a) == nc_to_json(back)
    s = NCFunctionElement(HEIS, {(0,): gaussian_poly((0, 0))})
    assert "opaque" in nc_to_dict(s)["terms"][0]
    with pytest.raises(ValueError):
        nc_from_dict(nc_to_dict(s), HEIS)


def test_mismatches():
    a = NCFunctionElement.one(HEIS)
    with pytest.raises(AlgebraMismatch):
        a + NCFunctionElement.one(E2)
    with pytest.raises(ModeMismatch):
        a + NCFunctionElement.one(HEIS, mode="holomorphic")
    with pytest.raises(ValueError):
        NCFunctionElement(HEIS, {(0, 0): R(HEIS).one})


def test_transport_is_multiplicative():
    # e1 -> e1 + e2, e2 -> e2, e3 -> e3 is an automorphism of the Heisenberg algebra
    images = [(1, 1, 0), (0, 1, 0), (0, 0, 1)]
    images = [tuple(HEIS.K.convert(c) for c in v) for v in images]
    for x, y in [("e1", "e2"), ("e1^2", "e2*e3"), ("e2*e1", "e1 + e3")]:
        a, b = parse_element(x, HEIS), parse_element(y, HEIS)
        lhs = transport_uea(uea_multiply(a, b), HEIS, images)
        rhs = uea_multiply(transport_uea(a, HEIS, images), transport_uea(b, HEIS, images))
        assert lhs == rhs


def test_product_independent_of_nilradical_basis():
    # same algebra with the central generator halved: [f1, f2] = 2 f3, so e3 -> 2 f3
    H2 = LieAlgebra(3, {(0, 1): (0, 0, 2)})
    images = [tuple(H2.K.convert(c) for c in v) for v in [(1, 0, 0), (0, 1, 0), (0, 0, 2)]]
    a, b = parse_element("e2*e3 + e1", HEIS), parse_element("e2^2 - e1*e3", HEIS)
    lhs = transport_uea(uea_multiply(a, b), H2, images)
    rhs = uea_multiply(transport_uea(a, H2, images), transport_uea(b, H2, images))
    assert lhs == rhs
