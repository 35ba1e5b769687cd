import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tdk.fourier import (
    FourierForm,
    average,
    invariant_decomposition,
    is_geometrically_invariant,
    random_fourier_form,
    twisted_d,
)
from tdk.rng import LCG
from tdk.scalars import I, PI, Cyclotomic, FormalScalar, exp_pi_i, parse_scalar, zeta

SEEDS = st.integers(0, 2**40)


# -- numeric oracle ------------------------------------------------------------


def cyc_value(c: Cyclotomic) -> complex:
    w = cmath.exp(2j * math.pi / c.M)
    return sum(float(a) * w ** j for j, a in enumerate(c.coeffs))


def scalar_value(s: FormalScalar) -> complex:
    return sum(cyc_value(s.coefficient(k)) * math.pi ** k for k in s.pi_degrees())


def function_value(f: FourierForm, theta) -> complex:
    """Value of the dtheta-free part of ``f`` at a point."""
    total = 0j
    for (k, e, idx), c in f.terms.items():
        if idx:
            continue
        phase = cmath.exp(2j * math.pi * sum(a * t for a, t in zip(k, theta)))
        poly = math.prod(t ** p for t, p in zip(theta, e))
        total += scalar_value(c) * phase * poly
    return total


cyclotomics = st.builds(
    lambda M, cs: Cyclotomic(M, [Fraction(a, b) for a, b in cs]),
    st.sampled_from([1, 3, 4, 5, 6, 8, 12]),
    st.lists(st.tuples(st.integers(-4, 4), st.integers(1, 3)), max_size=6),
)


@settings(max_examples=80, deadline=None)
@given(cyclotomics, cyclotomics)
def test_cyclotomic_arithmetic_matches_complex_numbers(a, b):
    assert abs(cyc_value(a + b) - (cyc_value(a) + cyc_value(b))) < 1e-9
    assert abs(cyc_value(a * b) - cyc_value(a) * cyc_value(b)) < 1e-8
    if not a.is_zero():
        assert abs(cyc_value(a.inverse()) * cyc_value(a) - 1) < 1e-8
    assert abs(cyc_value(a.conjugate()) - cyc_value(a).conjugate()) < 1e-9


def test_roots_of_unity():
    assert zeta(4) == I
    assert zeta(3) ** 3 == FormalScalar.of(1)
    assert exp_pi_i(1) == FormalScalar.of(-1)
    assert exp_pi_i(Fraction(1, 2)) == I
    assert str(zeta(3) ** 2) == "-1 - zeta(3)"
    # normalisation to the smallest conductor
    assert Cyclotomic.root(12, 4).normalized().M == 3


def test_parse_scalar_tokens():
    assert parse_scalar("2*pi*i") == PI * I * 2
    assert str(parse_scalar("2*pi*i")) == "2*i*pi"
    assert parse_scalar("zeta(6)^3") == FormalScalar.of(-1)
    assert str(parse_scalar("1/(2*pi*i)")) == "-1/2*i*pi^-1"
    with pytest.raises(ValueError):
        parse_scalar("zeta(0)")


@settings(max_examples=30, deadline=None)
@given(SEEDS)
def test_formal_scalar_numeric(seed):
    rng = LCG(seed)
    a = FormalScalar.of(rng.fraction()) + PI * I * rng.fraction() + PI * PI * rng.fraction()
    b = FormalScalar.of(rng.fraction()) + I * rng.fraction()
    assert abs(scalar_value(a * b) - scalar_value(a) * scalar_value(b)) < 1e-6


# -- Fourier forms -------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(SEEDS, st.sampled_from([1, 2, 3]))
def test_d_squared_and_average(seed, n):
    w = random_fourier_form(n, LCG(seed))
    assert w.d().d().is_zero()
    assert average(w.d()) == average(w).d()
    assert is_geometrically_invariant(average(w))


@settings(max_examples=30, deadline=None)
@given(SEEDS)
def test_translate_matches_evaluation(seed):
    rng = LCG(seed)
    f = random_fourier_form(2, rng, degree=0) + FourierForm.theta(2, 1).scale(rng.fraction())
    t = (rng.fraction(2, 4), rng.fraction(2, 4))
    g = f.translate(t)
    for theta in ((0.1, 0.2), (0.37, -0.55)):
        shifted = (theta[0] + float(t[0]), theta[1] + float(t[1]))
        assert abs(function_value(g, theta) - function_value(f, shifted)) < 1e-8


@settings(max_examples=30, deadline=None)
@given(SEEDS)
def test_d_of_function_matches_derivative(seed):
    f = random_fourier_form(2, LCG(seed), degree=0, cutoff=1) + FourierForm.theta(2, 2).wedge(FourierForm.theta(2, 1))
    df = f.d()
    x = (0.23, 0.61)
    h = 1e-6
    for j in range(2):
        comp = FourierForm(2, {(k, e, ()): c for (k, e, idx), c in df.terms.items() if idx == (j,)})
        plus = list(x); plus[j] += h
        minus = list(x); minus[j] -= h
        numeric = (function_value(f, plus) - function_value(f, minus)) / (2 * h)
        assert abs(function_value(comp, x) - numeric) < 1e-4


@settings(max_examples=40, deadline=None)
@given(SEEDS, st.sampled_from([2, 3]))
def test_invariant_decomposition_reconstructs(seed, n):
    rng = LCG(seed)
    w = random_fourier_form(n, rng).d() + random_fourier_form(n, rng, cutoff=0, terms=2)
    bar, alpha = invariant_decomposition(w)
    assert bar + alpha.d() == w
    assert bar == average(w)


@settings(max_examples=20, deadline=None)
@given(SEEDS)
def test_twisted_decomposition_on_t3(seed):
    rng = LCG(seed)
    h = FourierForm.dtheta(3, 1, 2, 3).scale(PI * I)
    w = twisted_d(h, random_fourier_form(3, rng))
    bar, alpha = invariant_decomposition(w, h)
    assert bar + twisted_d(h, alpha) == w


def test_cartan_formula_on_modes():
    # (d i_u + i_u d) w = derivative of w along u, which on a mode multiplies by 2 pi i k.u
    w = FourierForm.wave((1, 2)).wedge(FourierForm.dtheta(2, 1))
    u = (Fraction(1), Fraction(3))
    lie = w.interior(u).d() + w.d().interior(u)
    assert lie == w.scale(2 * PI * I * 7)


def test_json_roundtrip():
    w = random_fourier_form(3, LCG(1)) + FourierForm.theta(3, 2).wedge(FourierForm.dtheta(3, 1))
    assert FourierForm.from_json(w.to_json()) == w


def test_average_rejects_polynomial_forms():
    with pytest.raises(ValueError):
        average(FourierForm.theta(2, 1))
