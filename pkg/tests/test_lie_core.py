import json

import pytest
from sympy import QQ

from ncsmooth.errors import (DimensionMismatch, IrrationalEigenvalues, JacobiViolation, NotAnIdeal,
                             NotTriangular, ParseError)
from ncsmooth.lie_core import LieAlgebra, bracket, triangular_flag, validate_structure
from ncsmooth.linalg import Subspace
from ncsmooth.reps import CATALOG_NAMES, catalog, upper_triangular_algebra


def span(L, *vecs):
    return Subspace.span([tuple(QQ(x) for x in v) for v in vecs], L.m, L.K)


@pytest.fixture(scope="module")
def af1():
    return catalog("af1").algebra


@pytest.fixture(scope="module")
def heis():
    return catalog("heisenberg").algebra


@pytest.fixture(scope="module")
def e2():
    return catalog("e2").algebra


def test_validate_structure_accepts_af1_and_abelian():
    L = validate_structure({(1, 2): {2: 1}})
    assert L.m == 2 and L.bracket(L.unit(0), L.unit(1)) == L.unit(1)
    A = validate_structure({}, m=2)
    assert A.is_nilpotent and A.bracket(A.unit(0), A.unit(1)) == (0, 0)


def test_jacobi_violation_detected():
    with pytest.raises(JacobiViolation):
        validate_structure({(1, 2): {3: 1}, (1, 3): {3: 1}, (2, 3): {1: 1}})


def test_bad_dimension_and_inconsistent_pairs():
    with pytest.raises(DimensionMismatch):
        LieAlgebra(2, {(0, 1): (1, 0, 0)})
    with pytest.raises(JacobiViolation):
        LieAlgebra(2, {(0, 1): (0, 1), (1, 0): (0, 1)})
    with pytest.raises(JacobiViolation):
        LieAlgebra(2, {(0, 0): (1, 0)})


def test_brackets(heis, e2):
    assert bracket(heis.unit(0), heis.unit(1), heis) == heis.unit(2)
    assert bracket(e2.unit(0), e2.unit(2), e2) == (0, -1, 0)
    for L in (heis, e2):
        x = (QQ(1), QQ(-2), QQ(3))
        assert L.bracket(x, x) == (0, 0, 0)


def test_series(heis, af1):
    lcs = heis.lower_central_series()
    assert [S.dim for S in lcs] == [3, 1, 0]
    assert lcs[1] == span(heis, (0, 0, 1))
    ds = af1.derived_series()
    assert [S.dim for S in ds] == [2, 1, 0]
    assert af1.is_solvable and not af1.is_nilpotent
    ab = catalog("abelian(3)").algebra
    assert [S.dim for S in ab.lower_central_series()] == [3, 0]


def test_nilradical(af1, heis):
    assert af1.nilradical() == span(af1, (0, 1))
    assert heis.nilradical() == span(heis, (0, 0, 1))
    assert catalog("abelian(2)").algebra.nilradical().dim == 0


def test_center_and_quotient(heis, af1):
    Z = heis.center()
    assert Z == span(heis, (0, 0, 1))
    Q, proj = heis.quotient(Z)
    assert Q.m == 2 and not Q.sparse
    assert catalog("abelian(2)").algebra.center().dim == 2
    assert af1.center().dim == 0
    with pytest.raises(NotAnIdeal):
        heis.quotient(span(heis, (1, 0, 0)))


@pytest.mark.parametrize("name", ["heisenberg", "af1", "tri(3)"])
def test_quotient_preserves_brackets(name):
    L = catalog(name).algebra
    I = L.derived if name != "heisenberg" else L.center()
    Q, proj = L.quotient(I)
    for a in range(L.m):
        for b in range(L.m):
            assert proj(L.bracket(L.unit(a), L.unit(b))) == Q.bracket(proj(L.unit(a)), proj(L.unit(b)))


@pytest.mark.parametrize("name", ["af1", "heisenberg", "tri(2)", "tri(3)"])
def test_nilradical_invariant_and_nilpotent(name):
    L = catalog(name).algebra
    N = L.nilradical()
    for i in range(L.m):
        for v in N.basis:
            assert N.contains(L.bracket(L.unit(i), v))
    assert L.lower_central_series(N)[-1].dim == 0


def test_af1_flag(af1):
    cert = triangular_flag(af1)
    assert cert.ideals[1] == span(af1, (0, 1))
    assert cert.functionals[0][0] == 1  # ad e1 acts on span(e2) by 1
    assert cert.check(af1)


def test_e2_not_triangular(e2):
    with pytest.raises(NotTriangular) as info:
        triangular_flag(e2)
    assert info.value.payload["label"] == "e1"


def test_irrational_eigenvalues():
    # ad e1 on span(e2, e3) has eigenvalues +-sqrt(2)
    L = LieAlgebra(3, {(0, 1): (0, 0, 1), (0, 2): (0, 2, 0)})
    with pytest.raises(IrrationalEigenvalues):
        triangular_flag(L)


@pytest.mark.parametrize("name", [n for n in CATALOG_NAMES if n != "e2"])
def test_flag_exists_on_triangular_catalog(name):
    L = catalog(name).algebra
    cert = triangular_flag(L)
    assert [I.dim for I in cert.ideals] == list(range(L.m + 1))
    if L.is_nilpotent:
        assert all(c == 0 for f in cert.functionals for c in f)


def test_tri4_flag():
    assert triangular_flag(upper_triangular_algebra(4)).check(upper_triangular_algebra(4))


def test_json_round_trip(heis):
    text = heis.to_json()
    back = LieAlgebra.from_json(text)
    assert back.same_as(heis) and back.labels == heis.labels
    with pytest.raises(ParseError):
        LieAlgebra.from_json("{not json")
    with pytest.raises(ParseError):
        LieAlgebra.from_dict({"dim": 2, "brackets": [{"i": 2, "j": 1, "c": {"1": "1"}}]})
    with pytest.raises(DimensionMismatch):
        LieAlgebra.from_dict({"dim": 2, "brackets": [{"i": 1, "j": 2, "c": {"5": "1"}}]})
    assert json.loads(text)["brackets"] == [{"i": 1, "j": 2, "c": {"3": "1"}}]
