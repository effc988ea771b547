"""Divided differences, B-splines, Bernstein-Bezier bases and exact integrals.

B-splines here carry unit integral: ``B(x | t_{0:k+1}) = (k+1) [t_0..t_{k+1}] (. - x)_+^k``,
which is ``(k+1)/(t_{k+1} - t_0)`` times the partition-of-unity spline ``N``
produced by the Cox-de Boor recurrence.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .exact import RatMatrix, RatPoly, binom, integrate_on, poly_eval, to_rational


def _knots(knots) -> tuple:
    t = tuple(to_rational(v) for v in knots)
    if any(b < a for a, b in zip(t, t[1:])):
        raise ValueError(f"knots must be non-decreasing: {t}")
    return t


def complete_homogeneous(knots, degree: int) -> Fraction:
    """Sum over all multi-indices |w| = degree of t^w (0 for negative degree)."""
    if degree < 0:
        return Fraction(0)
    # h_m(t_0..t_q) = h_m(t_0..t_{q-1}) + t_q h_{m-1}(t_0..t_q)
    h = [Fraction(1)] + [Fraction(0)] * degree
    for t in knots:
        for m in range(1, degree + 1):
            h[m] += t * h[m - 1]
    return h[degree]


def divdiff_monomial(knots, power: int) -> Fraction:
    """Divided difference of ``t -> t**power`` over possibly repeated knots.

    Steffensen's formula turns this into a complete homogeneous symmetric
    sum, so repeated knots need no special handling.
    """
    t = _knots(knots)
    if power < 0:
        raise ValueError("power must be non-negative")
    return complete_homogeneous(t, power - (len(t) - 1))


def divdiff(knots, deriv) -> Fraction:
    """Divided difference by the textbook recursion.

    ``deriv(t, m)`` must return the m-th derivative of the target function
    at ``t``; it is consulted when the end knots of a sub-sequence coincide.
    """
    t = _knots(knots)
    memo = {}

    def dd(i, j):
        key = (i, j)
        if key not in memo:
            if t[i] == t[j]:
                memo[key] = Fraction(deriv(t[i], j - i)) / factorial(j - i)
            else:
                memo[key] = (dd(i + 1, j) - dd(i, j - 1)) / (t[j] - t[i])
        return memo[key]

    return dd(0, len(t) - 1)


def _truncated_power(x, k):
    """Derivatives of ``t -> max(t - x, 0)**k``; the zeroth power is [t > x]."""

    def deriv(t, m):
        if m > k:
            return 0
        if t <= x:
            return 0
        return Fraction(factorial(k), factorial(k - m)) * (t - x) ** (k - m)

    return deriv


def _check_support(t):
    if len(t) < 2:
        raise ValueError("a B-spline needs at least two knots")
    if t[0] == t[-1]:
        raise ValueError(f"degenerate knot vector {t}: zero-length support")


def bspline_eval(x, knots) -> Fraction:
    """Value of the unit-integral B-spline at ``x`` via its divided-difference form."""
    t = _knots(knots)
    _check_support(t)
    x = to_rational(x)
    k = len(t) - 2
    if x < t[0] or x >= t[-1]:
        return Fraction(0)
    return (k + 1) * divdiff(t, _truncated_power(x, k))


@dataclass(frozen=True)
class PiecewisePoly:
    """Polynomial pieces on ``[breakpoints[m], breakpoints[m+1])``; zero outside."""

    breakpoints: tuple
    pieces: tuple

    def __post_init__(self):
        bp = tuple(to_rational(b) for b in self.breakpoints)
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(self.pieces) != len(bp) - 1:
            raise ValueError("need one piece per interval")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "pieces", tuple(self.pieces))

    @classmethod
    def single(cls, lo, hi, poly: RatPoly) -> PiecewisePoly:
        return cls((lo, hi), (poly,))

    def piece_at(self, x):
        m = bisect_right(self.breakpoints, x) - 1
        if 0 <= m < len(self.pieces):
            return self.pieces[m]
        return None

    def __call__(self, x):
        p = self.piece_at(x)
        if p is None:
            return Fraction(0) if isinstance(x, (int, Fraction)) else 0.0
        return poly_eval(p, x)

    @property
    def support(self):
        return self.breakpoints[0], self.breakpoints[-1]

    def derivative(self, order: int = 1) -> PiecewisePoly:
        return PiecewisePoly(self.breakpoints, [p.derivative(order) for p in self.pieces])

    def scale(self, c) -> PiecewisePoly:
        return PiecewisePoly(self.breakpoints, [p * c for p in self.pieces])

    def integral(self) -> Fraction:
        return sum((integrate_on(p, a, b) for p, a, b in
                    zip(self.pieces, self.breakpoints, self.breakpoints[1:])), Fraction(0))


def bspline_pieces(knots) -> PiecewisePoly:
    """Exact polynomial pieces of the unit-integral B-spline (Cox-de Boor)."""
    t = _knots(knots)
    _check_support(t)
    k = len(t) - 2
    distinct = sorted(set(t))
    pieces = []
    x = RatPoly.monomial(1)
    for lo, hi in zip(distinct, distinct[1:]):
        N = [RatPoly([1]) if t[i] <= lo and hi <= t[i + 1] else RatPoly() for i in range(k + 1)]
        for deg in range(1, k + 1):
            nxt = []
            for i in range(k + 1 - deg):
                term = RatPoly()
                if t[i + deg] != t[i] and N[i]:
                    term = term + (x - t[i]) * N[i] * (1 / (t[i + deg] - t[i]))
                if t[i + deg + 1] != t[i + 1] and N[i + 1]:
                    term = term + (t[i + deg + 1] - x) * N[i + 1] * (1 / (t[i + deg + 1] - t[i + 1]))
                nxt.append(term)
            N = nxt
        pieces.append(N[0] * Fraction(k + 1, 1) * (1 / (t[-1] - t[0])))
    return PiecewisePoly(distinct, pieces)


def bernstein_local(d: int, ell: int) -> RatPoly:
    """C(d, ell) x^ell (1 - x)^(d - ell) on the unit interval."""
    x = RatPoly.monomial(1)
    return (x ** ell) * ((1 - x) ** (d - ell)) * binom(d, ell)


def bernstein_basis(d: int, i_cell: int, breakpoints=None) -> list:
    """Bernstein polynomials of degree ``d`` on one cell, as PiecewisePoly.

    The cell is ``[s_i, s_{i+1}]`` from ``breakpoints`` (consecutive integers
    if omitted). Following the DG convention the polynomial is not
    normalised by the cell length.
    """
    if breakpoints is None:
        lo, hi = Fraction(i_cell), Fraction(i_cell + 1)
    else:
        lo, hi = to_rational(breakpoints[i_cell]), to_rational(breakpoints[i_cell + 1])
    x = RatPoly.monomial(1)
    out = []
    for ell in range(d + 1):
        p = ((x - lo) ** ell) * ((hi - x) ** (d - ell)) * binom(d, ell)
        out.append(PiecewisePoly.single(lo, hi, p))
    return out


def poly_to_bernstein(p: RatPoly, d: int) -> list:
    """Bernstein coefficients on [0, 1] of a polynomial of degree <= d."""
    if p.degree > d:
        raise ValueError("polynomial degree exceeds Bernstein degree")
    a = list(p.coeffs) + [Fraction(0)] * (d + 1 - len(p.coeffs))
    return [sum((binom(ell, m) / binom(d, m) * a[m] for m in range(ell + 1)), Fraction(0))
            for ell in range(d + 1)]


def uniform_bspline_bb_coeffs(d: int) -> RatMatrix:
    """Columns are Bernstein coefficients of the pieces of B(. | 0:d+1)."""
    pp = bspline_pieces(range(d + 2))
    cols = []
    for rho, piece in enumerate(pp.pieces):
        local = piece.compose_linear(1, rho)
        cols.append(poly_to_bernstein(local, d))
    return RatMatrix.from_rows([[cols[rho][ell] for rho in range(d + 1)] for ell in range(d + 1)])


def bernstein_mass_matrix(d: int) -> RatMatrix:
    """Gram matrix of degree-d Bernstein polynomials on [0, 1]."""
    return RatMatrix.from_rows(
        [[binom(d, ell) * binom(d, j) / binom(2 * d, ell + j) / (2 * d + 1)
          for j in range(d + 1)] for ell in range(d + 1)])


def integrate_piecewise_product(f: PiecewisePoly, g: PiecewisePoly, a=None, b=None) -> Fraction:
    """Exact integral of ``f * g`` over ``[a, b]`` (default: common support)."""
    lo = max(f.breakpoints[0], g.breakpoints[0])
    hi = min(f.breakpoints[-1], g.breakpoints[-1])
    if a is not None:
        lo = max(lo, to_rational(a))
    if b is not None:
        hi = min(hi, to_rational(b))
    if a is not None and b is not None and to_rational(a) > to_rational(b):
        raise ValueError("integrate_piecewise_product requires a <= b")
    if lo >= hi:
        return Fraction(0)
    cuts = sorted({lo, hi} | {x for x in f.breakpoints + g.breakpoints if lo < x < hi})
    total = Fraction(0)
    for u, v in zip(cuts, cuts[1:]):
        pf = f.piece_at(u)
        pg = g.piece_at(u)
        if pf and pg:
            total += integrate_on(pf * pg, u, v)
    return total
