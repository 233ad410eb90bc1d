import math

import numpy as np
import pytest
from scipy.linalg import expm

from ncsmooth import calculus as calc
from ncsmooth import coeffs as cf
from ncsmooth.errors import NonRealSpectrum, NotCommuting, NotNilpotent, SingularSolve
from ncsmooth.pbw import poly_ring
from ncsmooth.reps import catalog


def jordan(d: int) -> np.ndarray:
    return np.eye(d, k=1)


def floats(M) -> np.ndarray:
    return np.array(M.to_Matrix().tolist(), dtype=float)


ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


# -- growth ------------------------------------------------------------------------------
def test_diagonal_has_no_growth():
    rep = calc.exp_growth_scan(np.diag([1.0, 2.0]))
    assert rep.verdict == "polynomial" and abs(rep.alpha) < 0.05


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_jordan_block_growth(d):
    rep = calc.exp_growth_scan(jordan(d))
    assert rep.verdict == "polynomial"
    assert abs(rep.alpha - (d - 1)) <= 0.2


def test_jordan3_matches_closed_form():
    s = 7.5
    E = expm(1j * s * jordan(3))
    closed = np.eye(3) + 1j * s * jordan(3) + (1j * s) ** 2 / 2 * jordan(3) @ jordan(3)
    assert np.allclose(E, closed)


def test_rotation_is_exponential():
    assert calc.exp_growth_scan(ROTATION).verdict == "exponential"


def test_random_upper_triangular_is_polynomial():
    rng = np.random.default_rng(4)
    for _ in range(5):
        b = np.triu(rng.integers(-3, 4, size=(4, 4)).astype(float))
        rep = calc.exp_growth_scan(b)
        assert rep.verdict == "polynomial" and rep.alpha <= 3.2


def test_split_extension_is_polynomial():
    rng = np.random.default_rng(8)
    for _ in range(5):
        D = np.diag(rng.integers(-2, 3, size=2).astype(float))
        N = np.triu(rng.integers(-2, 3, size=(2, 2)).astype(float), 1)
        C = rng.integers(-2, 3, size=(2, 2)).astype(float)
        b = np.block([[D, C], [np.zeros((2, 2)), N]])
        assert calc.exp_growth_scan(b).verdict == "polynomial"


@pytest.mark.parametrize("name,rep", [("af1", "pi_3"), ("heisenberg", "pi_1"), ("tri(2)", "ad")])
def test_catalog_images_grow_polynomially(name, rep):
    pi = catalog(name).reps[rep]
    for M in pi.mats:
        r = calc.exp_growth_scan(floats(M), s_max=1e4)
        assert r.verdict == "polynomial" and r.alpha <= pi.d - 1 + 0.2


def test_growth_report_dict():
    d = calc.exp_growth_scan(jordan(2), s_max=1e3).to_dict()
    assert set(d) == {"alpha", "K", "residual", "tail_slope", "verdict"}


# -- resolvent --------------------------------------------------------------------------
def test_resolvent_exponents():
    assert calc.resolvent_scan(np.zeros((1, 1)), re_values=[0.0])["gamma_near"] == pytest.approx(1.0, abs=1e-6)
    assert calc.resolvent_scan(jordan(2))["gamma_near"] == pytest.approx(2.0, abs=0.01)
    assert calc.resolvent_scan(jordan(3))["gamma_far"] == pytest.approx(1.0, abs=0.05)


def test_resolvent_off_spectrum_is_bounded():
    rep = calc.resolvent_scan(ROTATION, re_values=[0.0])
    assert abs(rep["gamma_near"]) < 1e-3


def test_resolvent_rejects_real_points():
    with pytest.raises(SingularSolve):
        calc.resolvent_norm(jordan(2), 1.0 + 0j)


# -- nilpotent Taylor calculus ----------------------------------------------------------
GAUSS2 = cf.smooth(lambda X: np.exp(-np.atleast_2d(X)[:, 0] ** 2), 1)


def test_taylor_examples():
    assert np.allclose(calc.ordered_fc_taylor(GAUSS2, [jordan(2)]), np.eye(2), atol=1e-8)
    (x,) = poly_ring(catalog("af1").algebra.K, 1).gens
    assert np.allclose(calc.ordered_fc_taylor(x ** 3, [jordan(2)]), 0)
    with pytest.raises(NotNilpotent):
        calc.ordered_fc_taylor(GAUSS2, [np.diag([0.0, 1.0])])


def test_taylor_is_exact_on_polynomials():
    R = poly_ring(catalog("heisenberg").algebra.K, 2)
    x, y = R.gens
    p = 3 * x ** 2 * y - x + 2
    b1, b2 = jordan(3), np.eye(3, k=2)
    assert np.allclose(calc.ordered_fc_taylor(p, [b1, b2]), calc.ordered_monomial_value(p, [b1, b2]))


def test_flat_function_vanishes_under_taylor():
    def flat(X):
        x = np.atleast_2d(X)[:, 0]
        out = np.zeros_like(x)
        nz = x != 0
        out[nz] = np.exp(-1.0 / x[nz] ** 2)
        return out
    assert np.abs(calc.ordered_fc_taylor(cf.smooth(flat, 1), [jordan(3)])).max() < 1e-9


# -- Fourier quadrature -----------------------------------------------------------------
def gauss_hat(eps=1.0, m=1):
    return calc.gaussian_poly_fourier((0,) * m, eps)


def test_diagonal_gaussian():
    out = calc.ordered_fc_quadrature(None, [np.diag([0.0, 1.0])], fhat=gauss_hat())
    assert np.allclose(out, np.diag([1.0, math.exp(-0.5)]), atol=1e-6)


@pytest.mark.parametrize("d,n", [(2, 0), (3, 0), (3, 1), (3, 2)])
def test_nilpotent_quadrature_matches_taylor(d, n):
    b = 0.7 * jordan(d)
    out = calc.ordered_fc_quadrature(None, [b], fhat=calc.gaussian_poly_fourier((n,)))
    want = calc.ordered_fc_taylor(calc.gaussian_poly((n,)), [b])
    assert np.abs(out - want).max() < 1e-6


def test_mixed_spectrum_matches_exact():
    # b = diag(1, 1) + nilpotent part: f(b) = f(1) I + f'(1) N
    N = jordan(2)
    b = np.eye(2) + N
    out = calc.ordered_fc_quadrature(None, [b], fhat=gauss_hat())
    f1 = math.exp(-0.5)
    assert np.abs(out - (f1 * np.eye(2) - f1 * N)).max() < 1e-6


def test_commuting_diagonals_two_variables():
    b1, b2 = np.diag([0.0, 1.0, -0.5]), np.diag([1.0, 0.5, 0.0])
    fhat = gauss_hat(2.0, 2)  # exp(-x^2 - y^2)
    out = calc.ordered_fc_quadrature(None, [b1, b2], fhat=fhat)
    want = np.diag(np.exp(-np.diag(b1) ** 2 - np.diag(b2) ** 2))
    assert np.abs(out - want).max() < 1e-6
    weyl = calc.weyl_fc_quadrature(None, [b1, b2], fhat=fhat)
    assert np.abs(weyl - out).max() < 1e-6


def test_commuting_nilpotents_weyl_vs_ordered():
    b1, b2 = jordan(3), 0.5 * np.eye(3, k=2)
    fhat = calc.gaussian_poly_fourier((1, 0))
    w = calc.weyl_fc_quadrature(None, [b1, b2], fhat=fhat)
    o = calc.ordered_fc_quadrature(None, [b1, b2], fhat=fhat)
    t = calc.ordered_fc_taylor(calc.gaussian_poly((1, 0)), [b1, b2])
    assert np.abs(w - o).max() < 1e-6 and np.abs(o - t).max() < 1e-6


def test_zero_matrices_give_value_at_origin():
    out = calc.weyl_fc_quadrature(None, [np.zeros((2, 2))] * 2, fhat=gauss_hat(1.0, 2))
    assert np.allclose(out, np.eye(2), atol=1e-8)


def test_numeric_transform_of_bump():
    chi = calc.bump([1.0])
    out = calc.ordered_fc_quadrature(chi, [np.diag([0.0, 0.5])], support=[2.0])
    assert np.abs(out - np.eye(2)).max() < 1e-6


def test_flat_ideal_under_quadrature():
    # x^3 e^{-x^2/2} has a zero 2-jet at 0 and b^3 = 0
    out = calc.ordered_fc_quadrature(None, [jordan(3)], fhat=calc.gaussian_poly_fourier((3,)))
    assert np.abs(out).max() < 1e-6


def test_weyl_coordinate_via_damped_protocol():
    b1, b2 = np.diag([0.5, -1.0]), np.diag([1.0, 2.0])
    (x, y) = poly_ring(catalog("heisenberg").algebra.K, 2).gens
    out = calc.polynomial_fc(x, [b1, b2], protocol="damped", weyl=True)
    assert np.abs(out - b1).max() < 1e-6


def test_error_paths():
    with pytest.raises(NotCommuting):
        calc.weyl_fc_quadrature(None, [jordan(2), jordan(2).T], fhat=gauss_hat(1.0, 2))
    with pytest.raises(NonRealSpectrum):
        calc.ordered_fc_quadrature(None, [ROTATION], fhat=gauss_hat())
    with pytest.raises(ValueError):
        calc.ordered_fc_quadrature(lambda X: X[:, 0], [jordan(2)])
    with pytest.raises(ValueError):
        calc.polynomial_fc(poly_ring(catalog("af1").algebra.K, 1).gens[0], [jordan(2)], protocol="magic")


# -- calculus diagram -------------------------------------------------------------------
@pytest.mark.parametrize("rep", ["pi_1", "pi_2"])
def test_cutoff_protocol_matches_representation(rep):
    S = catalog("af1")
    A = S.algebra
    pi = S.reps[rep]
    x, y = poly_ring(A.K, 2).gens
    p = x ** 2 * y - 2 * x * y + 3 * x + 1
    bs = [floats(M) for M in pi.mats]
    got = calc.polynomial_fc(p, bs)
    want = np.zeros((pi.d, pi.d))
    for alpha, c in p.items():
        want += float(c) * floats(pi.of_monomial(alpha))
    assert np.abs(got - want).max() < 1e-5


def test_gaussian_poly_derivatives():
    g = calc.gaussian_poly((2,), 0.5)
    X = np.linspace(-2, 2, 9)[:, None]
    x = X[:, 0]
    want = (2 - 2.5 * x ** 2 + 0.25 * x ** 4) * np.exp(-x ** 2 / 4)
    assert np.allclose(cf.evaluate(cf.differentiate(g, (2,)), X), want)
