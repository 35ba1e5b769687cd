from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from tdk.cdga import CDGA, Form, Generator, exp_form, is_twisted_exact, twisted_cohomology, twisted_d
from tdk.fixtures import MODEL_FIXTURES, build_fixture
from tdk.hori import (
    ModelError,
    TDualityModel,
    dual_fiber_integrate,
    fiber_integrate,
    hori_transform,
    pushforward_twist_check,
    reverse_hori_transform,
    twist_change_check,
    verify_hori,
)


def random_form(A: CDGA, data) -> Form:
    coeffs = data.draw(st.lists(st.integers(-3, 3), min_size=A.dimension, max_size=A.dimension))
    return A.from_vector(coeffs)


# -- independent exterior-algebra oracle on T^3 --------------------------------


def _oracle_twisted_dims(twist_terms):
    """dims of H(Lambda[x,y,z], h ^) for h a combination of degree-3 subsets."""
    basis = [S for p in range(4) for S in combinations(range(3), p)]

    def wedge(S, T):
        if set(S) & set(T):
            return 0, None
        seq = list(S) + list(T)
        inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
        return (-1) ** inversions, tuple(sorted(seq))

    idx = {S: i for i, S in enumerate(basis)}
    M = sympy.zeros(len(basis), len(basis))
    for j, S in enumerate(basis):
        for H, c in twist_terms.items():
            s, R = wedge(H, S)
            if s:
                M[idx[R], j] += c * s
    dims = []
    for parity in (0, 1):
        cols = [i for i, S in enumerate(basis) if len(S) % 2 == parity]
        other = [i for i, S in enumerate(basis) if len(S) % 2 != parity]
        out = M.extract(other, cols)
        into = M.extract(cols, other)
        dims.append(len(cols) - out.rank() - into.rank())
    return tuple(dims)


def test_twisted_t3_against_oracle():
    d = build_fixture("t3-cdga")
    A = d.algebra
    assert A.dimension == 8
    assert tuple(twisted_cohomology(A).dims()) == _oracle_twisted_dims({}) == (4, 4)
    h = A.parse(d.twist)
    assert tuple(twisted_cohomology(A, h).dims()) == _oracle_twisted_dims({(0, 1, 2): 1}) == (3, 3)
    assert tuple(twisted_cohomology(A, h.scale(5)).dims()) == (3, 3)


def test_twist_change_is_invariant():
    A = build_fixture("t3-cdga").algebra
    r = twist_change_check(A, "x*y*z", "x*y + 2*y*z")
    assert r["intertwines"] and r["invariant"]


def test_parse_and_print():
    A = CDGA([("x", 1), ("y", 1), ("u", 2)], relations=["u^2"])
    w = A.parse("2*x*y - y*x + u/2")
    assert str(w) == "3*x*y + 1/2*u"
    assert A.parse("u*u").is_zero()
    assert A.parse("x*x").is_zero()


def test_d_squared_zero_is_enforced():
    # d(s) = y*z has d(y*z) = x*z != 0, so d^2 s != 0
    with pytest.raises(ValueError):
        CDGA([Generator("x", 2), Generator("y", 1, "x"), Generator("z", 1), Generator("s", 1, "y*z")])


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_leibniz_in_sigma_model(data):
    A = build_fixture("sigma-model").algebra
    a, b = random_form(A, data), random_form(A, data)
    for deg in range(0, 6):
        ad = a.component(deg)
        lhs = (ad * b).d()
        rhs = ad.d() * b + (ad * b.d() if deg % 2 == 0 else -(ad * b.d()))
        assert lhs == rhs
    assert a.d().d().is_zero()


def test_exp_form_inverse():
    A = build_fixture("k2-model").algebra
    beta = A.parse("u + A1*Â1")
    assert (exp_form(beta) * exp_form(-beta)) == A.one()


def test_buscher_point_values():
    M = build_fixture("buscher-point")
    assert str(hori_transform(M, "1")) == "Â"
    assert str(hori_transform(M, "A")) == "1"
    assert str(reverse_hori_transform(M, "Â")) == "1"


@pytest.mark.parametrize("name", MODEL_FIXTURES)
def test_lemma_identity_in_every_model(name):
    assert build_fixture(name).lemma_identity_residual().is_zero()


def test_hopf_model_frozen_report():
    rep = verify_hori(build_fixture("hopf-model"))
    assert rep.dimension == 4 and rep.rank == 4 and rep.iso
    assert rep.degree_shift == -1
    assert not rep.chain_map and rep.chain_map_sign == -1
    assert rep.failures[0] == {"basis": "A", "d_hhat_T": "-u*Â", "T_d_h": "u*Â"}
    assert rep.exact_to_exact
    assert set(rep.involution_sign.values()) == {1}


def test_k2_model_frozen_report():
    rep = verify_hori(build_fixture("k2-model"))
    assert rep.chain_map and rep.chain_map_sign == 1
    assert (rep.rank, rep.dimension, rep.degree_shift) == (12, 12, -2)
    assert set(rep.involution_sign.values()) == {-1}
    assert rep.involution_constant


def test_sigma_model_pushforward():
    M = build_fixture("sigma-model")
    r = pushforward_twist_check(M)
    assert (r.pi_h, r.pihat_hhat, r.sign) == ("-v", "-u", -1)
    assert str(fiber_integrate(M, M.h)) == "-v"
    assert str(dual_fiber_integrate(M, M.hhat)) == "-u"


def test_model_json_roundtrip():
    for name in MODEL_FIXTURES:
        M = build_fixture(name)
        assert TDualityModel.from_json(M.to_json()) == M


def test_invalid_model_is_rejected():
    # F must be closed of degree 2
    with pytest.raises(ModelError):
        TDualityModel([("u", 2), ("x", 1)], 1, ["x"], ["0"])


def test_twisted_exactness_helper():
    M = build_fixture("hopf-model")
    w = M.algebra.parse("A")
    assert is_twisted_exact(M.h, twisted_d(M.h, w))
