from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from tdk.linalg import (
    AbelianGroupPresentation,
    InfeasibleSystem,
    Matrix,
    cokernel_presentation,
    elementary_divisors,
    integer_kernel_basis,
    integer_solve,
    kernel_basis,
    left_kernel_basis,
    rank,
    rational_solve,
    smith_normal_form,
)


def int_matrices(max_rows=4, max_cols=4, bound=6):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n),
                               min_size=m, max_size=m)))


def test_identity_cokernel_is_trivial():
    g = cokernel_presentation(Matrix.identity(3))
    assert (g.free_rank, g.torsion, g.divisible_rank) == (0, (), 0)


def test_zero_map_cokernel_is_free():
    g = cokernel_presentation(Matrix.zeros(2, 3))
    assert (g.free_rank, g.torsion, g.divisible_rank) == (2, (), 0)


def _coset_count(M: Matrix) -> int:
    """|Z^m / im M| for square nonsingular M: distinct classes of a det-sized box."""
    seen = set()
    det = abs(int(sympy.Matrix(M.rows).det()))
    for v in product(range(det), repeat=M.nrows):
        x = sympy.Matrix(M.rows).LUsolve(sympy.Matrix(v))
        seen.add(tuple(sympy.Rational(a) % 1 for a in x))
    return len(seen)


def test_column_two_zero():
    g = cokernel_presentation(Matrix([[2], [0]]))
    assert (g.free_rank, g.torsion) == (1, (2,))


@pytest.mark.parametrize("rows", [[[2, 0], [0, 3]], [[4, 6], [2, 2]], [[1, 2], [3, 8]]])
def test_cokernel_order_matches_coset_enumeration(rows):
    M = Matrix(rows)
    g = cokernel_presentation(M)
    order = 1
    for d in g.torsion:
        order *= d
    assert g.free_rank == 0
    assert order == _coset_count(M)


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_smith_normal_form_properties(rows):
    M = Matrix(rows)
    U, D, V = smith_normal_form(M)
    assert U @ M @ V == D
    assert abs(U.det()) == 1 and abs(V.det()) == 1
    d = [x for x in D.diagonal() if x]
    assert all(x > 0 for x in d)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    assert D.is_diagonal()


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_rank_and_divisors_match_sympy(rows):
    M = Matrix(rows)
    S = sympy.Matrix(rows)
    assert rank(M) == S.rank()
    ds = elementary_divisors(M)
    assert len(ds) == S.rank()
    if S.shape[0] == S.shape[1] and S.rank() == S.shape[0]:
        prod = 1
        for x in ds:
            prod *= x
        assert prod == abs(S.det())


@settings(max_examples=60, deadline=None)
@given(int_matrices(), st.data())
def test_kernels(rows, data):
    M = Matrix(rows)
    for v in kernel_basis(M):
        assert all(x == 0 for x in (M @ Matrix.from_columns([v], M.ncols)).columns()[0])
    for y in left_kernel_basis(M):
        assert all(x == 0 for x in (Matrix([y]) @ M).rows[0])
    K = integer_kernel_basis(M)
    assert len(K) == M.ncols - rank(M)
    assert all(isinstance(x, int) for v in K for x in v)


@settings(max_examples=60, deadline=None)
@given(int_matrices(), st.data())
def test_rational_solve_roundtrip_or_certificate(rows, data):
    M = Matrix(rows)
    b = data.draw(st.lists(st.integers(-5, 5), min_size=M.nrows, max_size=M.nrows))
    try:
        x = rational_solve(M, b)
    except InfeasibleSystem as exc:
        y = exc.certificate
        assert all(v == 0 for v in (Matrix([y]) @ M).rows[0])
        assert sum(Fraction(a) * c for a, c in zip(y, b)) != 0
    else:
        got = (M @ Matrix.from_columns([x], M.ncols)).columns()[0]
        assert list(got) == [Fraction(v) for v in b]


def test_integer_solve_certificate():
    # 2x = 1 has a rational but no integer solution
    with pytest.raises(InfeasibleSystem) as info:
        integer_solve(Matrix([[2]]), [1])
    y = Fraction(info.value.certificate[0])
    assert (y * 2).denominator == 1
    assert (y * 1).denominator != 1


@settings(max_examples=60, deadline=None)
@given(int_matrices(), st.data())
def test_integer_solve_on_image(rows, data):
    M = Matrix(rows)
    z = data.draw(st.lists(st.integers(-4, 4), min_size=M.ncols, max_size=M.ncols))
    b = (M @ Matrix.from_columns([z], M.ncols)).columns()[0]
    x = integer_solve(M, b)
    assert all(Fraction(v).denominator == 1 for v in x)
    assert (M @ Matrix.from_columns([x], M.ncols)).columns()[0] == b


def test_presentation_arithmetic_and_text():
    g = AbelianGroupPresentation(free_rank=1, torsion=(2,), divisible_rank=1, vector_rank=1)
    h = AbelianGroupPresentation.from_invariants(orders=(3,))
    s = g + h
    assert s.torsion == (6,)
    assert s.free_part() == AbelianGroupPresentation(free_rank=1)
    assert str(AbelianGroupPresentation()) == "0"
    assert g.times(2).divisible_rank == 2
    assert s.to_json()["vector_rank"] == 1
