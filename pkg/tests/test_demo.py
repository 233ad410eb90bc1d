import numpy as np
import pytest
from hypothesis import given, settings

from ncsmooth.demo import (ArnoldiPolynomial, best_rows, blowup, demo_e2_blowup, exact_identity,
                           region_boundary, target)
from ncsmooth.errors import IllConditionedFit
from ncsmooth.pbw import poly_ring
from sympy import QQ_I

from oracles import poly_from_list, polys_1d


def test_blowup_is_the_commutator_of_the_target():
    lam = np.linspace(0.1, 1, 7)
    g = (target(lam - 1j) - target(lam + 1j)) / 2j
    assert np.allclose(g, blowup(lam))


@pytest.mark.parametrize("m,sup", [(2, 0.9411764705882353), (4, 1.9692307692307693), (8, 3.984435797665369)])
def test_true_sup_on_the_interval(m, sup):
    # 2/(l^3 + 4l) decreases on (0, 1], so its sup sits at l = 1/m
    assert blowup(1.0 / m) == pytest.approx(sup)
    assert blowup(np.linspace(1.0 / m, 1, 400)).max() == pytest.approx(sup)


@pytest.mark.parametrize("m", [2, 4, 8])
def test_region_boundary(m):
    Z = region_boundary(m, 400)
    assert len(Z) == 400
    assert np.all(np.abs(Z.real) <= m + 1e-12) and np.all(np.abs(Z.imag) <= 1 + 1e-12)
    assert np.all(np.abs(Z - 1j) >= 1 / m - 1e-12) and np.all(np.abs(Z + 1j) >= 1 / m - 1e-12)
    S = set(np.round(Z, 12))
    assert all(np.round(z.conjugate(), 12) in S and np.round(-z, 12) in S for z in Z[:50])


def test_arnoldi_reproduces_polynomials():
    Z = region_boundary(3, 200)
    F = Z ** 5 - 2 * Z + 1
    p = ArnoldiPolynomial(Z, F, 7)
    z = np.array([0.3 + 0.2j, -1.5])
    assert np.allclose(p(z), z ** 5 - 2 * z + 1)
    with pytest.raises(IllConditionedFit):
        ArnoldiPolynomial(Z, F, 200)


@given(coeffs=polys_1d(8))
@settings(max_examples=30)
def test_exact_identity_on_random_polynomials(coeffs):
    assert exact_identity(poly_from_list(QQ_I, coeffs))


def test_exact_identity_odd_polynomial():
    (l,) = poly_ring(QQ_I, 1).gens
    assert exact_identity(l ** 3 - 2 * l)


def test_m2_fit_reaches_the_true_sup():
    rows = demo_e2_blowup([2], [12, 120])
    low, high = rows
    assert low["exact_identity"] and not low["fit_ok"]
    assert high["fit_ok"] and high["relative_gap"] < 0.1
    assert high["max_imag_g"] < 1e-10
    assert best_rows(rows)[2] is high
