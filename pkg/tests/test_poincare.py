import time
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tdk.fixtures import build_fixture
from tdk.fourier import FourierForm, is_geometrically_invariant
from tdk.poincare import (
    EquivariantLineBundle,
    check_equivariance,
    cs_difference,
    curvature,
    fixed_obstruction_check,
    holonomy,
    holonomy_exponent,
    random_rectilinear_loop,
    stokes_check,
)
from tdk.rng import LCG
from tdk.scalars import I, PI, zeta

CURV = FourierForm.dtheta(2, 1, 2).scale(2 * PI * I)


@pytest.fixture(scope="module")
def standard():
    return build_fixture("poincare-standard")


@pytest.fixture(scope="module")
def paper():
    return build_fixture("poincare-paper")


def test_standard_model_is_equivariant(standard):
    rep = check_equivariance(standard)
    assert rep.passed and rep.cocycle


def test_paper_model_cocycle_and_residuals(paper):
    c = paper.cocycle_report()
    assert c["cocycle"] and c["generators_commute"]
    rep = check_equivariance(paper)
    assert not rep.passed
    assert {k: str(v) for k, v in rep.residuals.items()} == {"(1,0)": "-i*pi*dt2", "(0,1)": "-3*i*pi*dt1"}


def test_curvatures(standard, paper):
    assert curvature(standard) == CURV
    assert curvature(paper) == CURV
    assert is_geometrically_invariant(curvature(standard))


def test_holonomy_values(standard):
    third = Fraction(1, 3)
    assert holonomy(standard, [(0, 0), (0, 1)]) == zeta(1)
    assert holonomy(standard, [(third, 0), (third, 1)]) == zeta(3) ** 2
    assert str(holonomy(standard, [(third, 0), (third, 1)])) == "-1 - zeta(3)"
    assert holonomy(standard, [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]) == zeta(1)


def test_holonomy_rejects_open_paths(standard):
    with pytest.raises(ValueError):
        holonomy_exponent(standard, [(0, 0), (Fraction(1, 2), 0)])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**40), st.sampled_from(["poincare-standard", "poincare-paper"]))
def test_stokes(seed, name):
    L = build_fixture(name)
    loop = random_rectilinear_loop(LCG(seed))
    assert stokes_check(L, loop)["passed"]


def test_cs_differences(standard, paper):
    assert str(cs_difference(standard, Fraction(1, 2))) == "i*pi*dt2"
    assert str(cs_difference(paper, Fraction(1, 2))) == "1/2*i*pi*dt2"
    assert cs_difference(standard, 1) == FourierForm.dtheta(2, 2).scale(2 * PI * I)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_obstruction_certificates(standard, N):
    start = time.perf_counter()
    r = fixed_obstruction_check(standard, N, 3)
    assert time.perf_counter() - start < 5
    assert not r.feasible
    assert Fraction(r.certificate["y_dot_b"]) == Fraction(1, N)


def test_trivial_bundle_has_fixed_lift():
    r = fixed_obstruction_check(build_fixture("poincare-trivial"), 3, 3)
    assert r.feasible


def test_bad_cocycle_is_rejected():
    with pytest.raises(ValueError):
        EquivariantLineBundle("n*m*theta1", FourierForm.zero(2))


def test_json_roundtrip(paper):
    assert EquivariantLineBundle.from_json(paper.to_json()) == paper
