from fractions import Fraction as F
from itertools import product
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import binomial_identity_holds, steffensen_brute
from psiac.exact import RatMatrix, RatPoly, integrate_on
from psiac.splines import (PiecewisePoly, bernstein_basis, bernstein_mass_matrix, bspline_eval,
                           bspline_pieces, divdiff, divdiff_monomial, integrate_piecewise_product,
                           uniform_bspline_bb_coeffs)


def power_derivs(p):
    def deriv(t, m):
        if m > p:
            return 0
        return F(factorial(p), factorial(p - m)) * F(t) ** (p - m)
    return deriv


def test_divdiff_examples():
    assert divdiff_monomial((0, 1), 2) == 1
    assert divdiff_monomial((0, 0, 1), 3) == 1
    assert divdiff_monomial((0, 1, 2), 3) == 3
    assert divdiff_monomial((0, 1, 2), 1) == 0


def test_steffensen_matches_recursion_exhaustively():
    for length in range(1, 7):
        for knots in product(range(4), repeat=length):
            if list(knots) != sorted(knots):
                continue
            for power in range(9):
                want = divdiff(knots, power_derivs(power))
                assert divdiff_monomial(knots, power) == want
                assert steffensen_brute(knots, power) == want


def test_bspline_eval_examples():
    assert bspline_eval(1, (0, 1, 2)) == 1
    assert bspline_eval(5, (0, 1, 2)) == 0
    assert bspline_eval(2, (0, 1, 2)) == 0  # half-open support


def test_bspline_pieces_examples():
    x = RatPoly.monomial(1)
    hat = bspline_pieces((0, 1, 2))
    assert hat.breakpoints == (0, 1, 2)
    assert hat.pieces == (x, 2 - x)
    assert bspline_pieces((0, 0, 1)).pieces == (RatPoly([2, -2]),)
    assert bspline_pieces((0, 1)).pieces == (RatPoly([1]),)


def test_degenerate_support_rejected():
    with pytest.raises(ValueError):
        bspline_pieces((1, 1, 1))
    with pytest.raises(ValueError):
        bspline_eval(0, (2, 2))


knot_vectors = st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4),
                        min_size=2, max_size=6).map(sorted).filter(lambda t: t[0] != t[-1])


def _admissible(t):
    k = len(t) - 2
    return all(t.count(v) <= k + 1 for v in set(t))


@settings(max_examples=60, deadline=None)
@given(knot_vectors.filter(_admissible), st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=7),
                                                    min_size=1, max_size=4))
def test_pieces_match_divided_difference_form(t, xs):
    pp = bspline_pieces(t)
    for x in xs:
        assert pp(x) == bspline_eval(x, t)
        assert bspline_eval(x, t) >= 0


@settings(max_examples=60, deadline=None)
@given(knot_vectors.filter(_admissible))
def test_unit_integral(t):
    assert bspline_pieces(t).integral() == 1


def test_unit_integral_double_knot():
    assert bspline_pieces((0, 1, 1, 2)).integral() == 1


@pytest.mark.parametrize("t", [(0, 1, 1, 2), (0, 1, 1, 1, 3), (0, 0, 1, 2, 2), (-1, 0, 0, 1, 2, 2)])
def test_continuity_at_multiple_knots(t):
    k = len(t) - 2
    pp = bspline_pieces(t)
    for m, bp in enumerate(pp.breakpoints[1:-1], start=1):
        nu = t.count(bp)
        left, right = pp.pieces[m - 1], pp.pieces[m]
        for order in range(k - nu + 1):
            assert left.derivative(order)(bp) == right.derivative(order)(bp)
        if nu <= k:
            # the next derivative generally jumps
            assert left.derivative(k - nu + 1)(bp) != right.derivative(k - nu + 1)(bp)


def test_bernstein_examples():
    x = RatPoly.monomial(1)
    assert bernstein_basis(1, 0)[0].pieces == (1 - x,)
    assert bernstein_basis(2, 0)[1].pieces == (x * (1 - x) * 2,)
    for d in range(5):
        total = RatPoly()
        for b in bernstein_basis(d, 3):
            total = total + b.pieces[0]
        assert total == RatPoly.constant(1)


def test_uniform_bb_coeffs_published_values():
    assert uniform_bspline_bb_coeffs(1) == RatMatrix.from_rows([[0, 1], [1, 0]])
    assert uniform_bspline_bb_coeffs(2) == RatMatrix.from_rows([[0, 1, 1], [0, 2, 0], [1, 1, 0]]).scale(F(1, 2))
    assert uniform_bspline_bb_coeffs(3) == RatMatrix.from_rows(
        [[0, 1, 4, 1], [0, 2, 4, 0], [0, 4, 2, 0], [1, 4, 1, 0]]).scale(F(1, 6))


def test_mass_matrix():
    assert bernstein_mass_matrix(0) == RatMatrix.from_rows([[1]])
    assert bernstein_mass_matrix(1) == RatMatrix.from_rows([[F(1, 3), F(1, 6)], [F(1, 6), F(1, 3)]])
    for d in range(6):
        M = bernstein_mass_matrix(d)
        assert M[0, 0] == F(1, 2 * d + 1)
        basis = [b.pieces[0] for b in bernstein_basis(d, 0)]
        assert M.to_rows() == [[integrate_on(p * q, 0, 1) for q in basis] for p in basis]


def test_piecewise_product_examples():
    hat = bspline_pieces((0, 1, 2))
    assert integrate_piecewise_product(hat, hat, 0, 2) == F(2, 3)
    one = PiecewisePoly.single(-10, 10, RatPoly.constant(1))
    assert integrate_piecewise_product(one, bspline_pieces((0, F(1, 2), 1, 3))) == 1
    assert integrate_piecewise_product(hat, bspline_pieces((5, 6, 7))) == 0


def test_binomial_identity_example():
    assert binomial_identity_holds(0, (1, 0), 2) == (3, 3)


def test_binomial_identity_brute_force():
    for k in range(3):
        for a in product(range(4), repeat=k + 2):
            if sum(a) > 3:
                continue
            for delta in range(7):
                lhs, rhs = binomial_identity_holds(k, a, delta)
                assert lhs == rhs
