from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tdk.diffcochain import (
    DiffCochain,
    DiffCohomologyClass,
    GeometricMorphism,
    NotTrivialisable,
    characteristic,
    curvature,
    dcheck,
    diff_cohomology,
    diff_cup,
    exact_sequences,
    geometric_trivialisation,
    holonomy_class,
    inclusion,
    is_cocycle,
    is_zero_class,
    pair_check,
    structure_maps,
    topological_trivialisation,
)
from tdk.fixtures import build_fixture
from tdk.rng import LCG
from tdk.simplicial import VECTOR, Cochain, coboundary, cup, ngon, point, sphere, torus9

SEEDS = st.integers(0, 2**40)


def test_branch_formula_on_circle():
    X = ngon(3)
    c = Cochain(X, 1, X.integer_cocycle_basis(1)[0])
    x = DiffCochain(1, 1, c, Cochain.zero(X, 0, VECTOR), Cochain.zero(X, 1, VECTOR))
    y = dcheck(x)
    assert y.c.is_zero()
    assert y.h == c.vector()
    assert y.omega.is_zero()


@settings(max_examples=80, deadline=None)
@given(SEEDS, st.integers(0, 4), st.data())
def test_dd_zero(seed, p, data):
    q = data.draw(st.integers(0, p + 1))
    X = data.draw(st.sampled_from([ngon(3), torus9()]))
    x = DiffCochain.random(X, p, q, LCG(seed))
    assert dcheck(dcheck(x)).is_zero()


@settings(max_examples=40, deadline=None)
@given(SEEDS, st.integers(1, 2), st.integers(1, 2))
def test_cup_compatibilities(seed, p, q):
    rng = LCG(seed)
    X = torus9()
    x = DiffCochain.random_cocycle(X, p, rng)
    y = DiffCochain.random_cocycle(X, q, rng)
    z = diff_cup(x, y)
    assert is_cocycle(z)
    assert curvature(z) == cup(curvature(x), curvature(y))
    assert characteristic(z) == cup(characteristic(x), characteristic(y))


@settings(max_examples=40, deadline=None)
@given(SEEDS, st.integers(0, 2), st.integers(0, 2), st.data())
def test_leibniz_on_arbitrary_cochains(seed, p, q, data):
    rng = LCG(seed)
    X = torus9()
    a = DiffCochain.random(X, p, data.draw(st.integers(0, p + 1)), rng)
    b = DiffCochain.random(X, q, data.draw(st.integers(0, q + 1)), rng)
    second = diff_cup(a, dcheck(b))
    assert dcheck(diff_cup(a, b)) == diff_cup(dcheck(a), b) + (second if p % 2 == 0 else -second)


def test_random_cocycle_structure_maps():
    rng = LCG(5)
    X = torus9()
    for p in (1, 2):
        x = DiffCochain.random_cocycle(X, p, rng)
        s = structure_maps(x)
        assert s.curvature_has_lattice_periods
        assert coboundary(s.curvature).is_zero()


def test_inclusion_of_integral_cocycle_is_zero():
    X = ngon(3)
    eta = Cochain(X, 1, X.integer_cocycle_basis(1)[0]).vector()
    x = inclusion(eta)
    assert is_cocycle(x)
    assert characteristic(x).is_zero()
    assert is_zero_class(x)


def test_inclusion_of_fractional_period_is_not_zero():
    X = ngon(3)
    eta = Cochain.indicator(X, X.simplices(1)[0], VECTOR).scale(Fraction(1, 3))
    assert not is_zero_class(inclusion(eta))


def test_holonomy_third_dichotomy():
    X = ngon(3)
    x = holonomy_class(X, Fraction(1, 3))
    assert characteristic(x).is_zero()
    assert curvature(x).is_zero()
    assert not is_zero_class(x)
    g = geometric_trivialisation(x)
    assert isinstance(g, GeometricMorphism)
    # the witness has a nonzero form slot: a connection is not preserved
    assert g.witness.omega is not None and not g.witness.omega.is_zero()
    with pytest.raises(NotTrivialisable) as info:
        topological_trivialisation(x)
    y = info.value.certificate
    assert y is not None
    # y pairs h to 1/3 modulo Z: the holonomy is seen by the certificate
    total = sum(Fraction(a) * b for a, b in zip(y, x.h.values))
    assert total % 1 == Fraction(1, 3)


def test_integer_holonomy_is_topologically_trivial():
    X = ngon(3)
    x = holonomy_class(X, 1)
    a = topological_trivialisation(x)
    assert dcheck(a) == x


def test_classes_compare_up_to_coboundaries():
    rng = LCG(9)
    X = ngon(3)
    x = DiffCochain.random_cocycle(X, 2, rng)
    y = DiffCochain.random(X, 1, 2, rng)
    assert DiffCohomologyClass(x) == DiffCohomologyClass(x + dcheck(y))
    assert DiffCohomologyClass(x) != DiffCohomologyClass(x + holonomy_class(X, Fraction(1, 2)))


def test_known_groups():
    assert str(diff_cohomology(point(), 1)) == "Q/Z"
    assert str(diff_cohomology(ngon(3), 2)) == "Q/Z"
    assert diff_cohomology(ngon(3), 1).divisible_rank == 1
    assert diff_cohomology(ngon(3), 1).free_rank == 1


@pytest.mark.parametrize("make", [point, lambda: ngon(3), lambda: ngon(5), lambda: sphere(2), torus9])
def test_exact_sequences_consistent(make):
    X = make()
    for p in range(1, X.dimension + 2):
        assert exact_sequences(X, p)["consistent"]


def test_pair_fixtures():
    ok = build_fixture("pair-torus-9")
    rep = pair_check(ok.P, ok.Phat, ok.sigma)
    assert rep.valid and rep.residual.is_zero()
    searched = pair_check(ok.P, ok.Phat)
    assert searched.valid
    bad = build_fixture("pair-s2xs2-ab")
    rep = pair_check(bad.P, bad.Phat)
    assert not rep.valid and not rep.char_cup_vanishes
    aa = build_fixture("pair-s2xs2-aa")
    assert pair_check(aa.P, aa.Phat, aa.sigma).valid


def test_wrong_sigma_is_rejected_with_residual():
    # needs a 4-dimensional base; on a surface C^4 vanishes and every sigma passes
    d = build_fixture("pair-s2xs2-aa")
    X = d.complex
    bump = Cochain.indicator(X, X.simplices(3)[0], VECTOR)
    wrong = DiffCochain(3, 3, d.sigma.c, d.sigma.h, d.sigma.omega + bump)
    rep = pair_check(d.P, d.Phat, wrong)
    assert not rep.valid
    assert not rep.residual.is_zero()
