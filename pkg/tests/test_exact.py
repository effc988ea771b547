from fractions import Fraction as F
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import cofactor_inverse
from psiac.errors import SingularMatrix
from psiac.exact import (RatMatrix, RatPoly, binom, integrate_on, multi_indices, poly_eval, rat_inverse,
                         rat_solve, rat_str, to_rational)

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=12)


def test_solve_identity_returns_rhs():
    B = RatMatrix.from_rows([[1, F(2, 3)], [-4, 5], [F(1, 7), 0]])
    assert rat_solve(RatMatrix.identity(3), B) == B


def test_solve_diagonal():
    X = rat_solve(RatMatrix.from_rows([[2, 0], [0, 4]]), RatMatrix.identity(2))
    assert X == RatMatrix.from_rows([[F(1, 2), 0], [0, F(1, 4)]])


def test_inverse_hilbert_matches_cofactor_oracle():
    rows = [[F(1, i + j + 1) for j in range(4)] for i in range(4)]
    X = rat_inverse(RatMatrix.from_rows(rows))
    assert X[0, 0] == 16
    assert X.to_rows() == cofactor_inverse(rows)
    assert all(v.denominator == 1 for v in X.entries)


def test_singular_raises():
    with pytest.raises(SingularMatrix):
        rat_solve(RatMatrix.from_rows([[1, 2], [2, 4]]), RatMatrix.identity(2))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.lists(st.lists(rationals, min_size=n, max_size=n),
                                                     min_size=n, max_size=n)))
def test_inverse_both_sides(rows):
    A = RatMatrix.from_rows(rows)
    try:
        X = rat_inverse(A)
    except SingularMatrix:
        return
    n = A.rows
    assert A @ X == RatMatrix.identity(n)
    assert X @ A == RatMatrix.identity(n)
    assert all(gcd(v.numerator, v.denominator) == 1 and v.denominator > 0 for v in X.entries)


def test_poly_eval_examples():
    assert poly_eval(RatPoly(), 5) == 0
    assert poly_eval(RatPoly.monomial(2), F(3, 2)) == F(9, 4)
    assert poly_eval(RatPoly([1, -2, 1]), 1) == 0


def test_poly_trailing_zeros_stripped():
    assert RatPoly([1, 2, 0, 0]).coeffs == (1, 2)
    assert RatPoly([0, 0]).coeffs == ()
    assert RatPoly([0]).degree < 0


def test_integrate_on_examples():
    x = RatPoly.monomial(1)
    assert integrate_on(RatPoly.constant(1), 0, 1) == 1
    assert integrate_on(x * x, 0, 1) == F(1, 3)
    assert integrate_on(x * (1 - x), 0, 1) == F(1, 6)


@given(st.lists(rationals, max_size=6), rationals, rationals, rationals)
def test_integrate_additive(coeffs, a, b, c):
    a, b, c = sorted((a, b, c))
    p = RatPoly(coeffs)
    assert integrate_on(p, a, b) + integrate_on(p, b, c) == integrate_on(p, a, c)


@given(st.lists(rationals, max_size=5), st.lists(rationals, max_size=5), rationals)
def test_poly_ring_ops_pointwise(pc, qc, x):
    p, q = RatPoly(pc), RatPoly(qc)
    assert (p * q)(x) == p(x) * q(x)
    assert (p + q)(x) == p(x) + q(x)
    assert (p - q)(x) == p(x) - q(x)


@given(st.lists(rationals, max_size=5), rationals, rationals, rationals)
def test_compose_linear(pc, alpha, beta, x):
    p = RatPoly(pc)
    assert p.compose_linear(alpha, beta)(x) == p(alpha * x + beta)


def test_derivative_of_antiderivative():
    p = RatPoly([F(1, 3), -2, 5, F(7, 2)])
    assert p.antiderivative().derivative() == p
    assert p.derivative(4) == RatPoly()


def test_binom():
    assert binom(4, 2) == 6
    assert binom(3, 0) == 1
    assert binom(5, 6) == 0
    assert binom(5, -1) == 0


def test_multi_indices_count():
    # compositions of 4 into 3 non-negative parts: C(6, 2)
    idx = list(multi_indices(3, 4))
    assert len(idx) == 15
    assert all(sum(w) == 4 for w in idx)
    assert len(set(idx)) == 15


def test_rational_strings():
    assert rat_str(F(-6, 4)) == "-3/2"
    assert rat_str(F(0)) == "0/1"
    assert to_rational("3/9") == F(1, 3)
    assert to_rational(0.5) == F(1, 2)
    assert RatMatrix.from_rows([[F(1, 2), 3]]).to_strings() == [["1/2", "3/1"]]
