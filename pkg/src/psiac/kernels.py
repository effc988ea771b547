"""Reproduction matrices, exact kernel coefficients and the filter catalog."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import UnsupportedDegree
from .exact import RatMatrix, RatPoly, binom, rat_inverse, rat_str, to_rational
from .splines import PiecewisePoly, bspline_pieces, complete_homogeneous

SIDES = ("L", "R", "sym")
CATALOG = ("RS", "SRV", "RLKV", "MULTIKNOT", "SYMMETRIC")


@dataclass(frozen=True)
class FilterSpec:
    """A spline kernel over prototype knots ``t_{0:n}``.

    ``index_sequence`` lists the B-splines ``B(. | t_{j:j+k+1})`` that carry a
    coefficient; it starts at 0 and ends at ``j_r`` so that ``n = j_r + k + 1``.
    """

    name: str
    degree: int
    reproduction_degree: int
    index_sequence: tuple
    knots: tuple
    side: str = "sym"
    dg_degree: int | None = None

    def __post_init__(self):
        knots = tuple(to_rational(t) for t in self.knots)
        chi = tuple(int(j) for j in self.index_sequence)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "index_sequence", chi)
        k, r = self.degree, self.reproduction_degree
        if k < 0 or r < 0:
            raise ValueError("degree and reproduction degree must be non-negative")
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")
        if len(chi) != r + 1:
            raise ValueError(f"index sequence needs r+1={r + 1} entries, got {len(chi)}")
        if chi[0] != 0 or any(b <= a for a, b in zip(chi, chi[1:])):
            raise ValueError("index sequence must start at 0 and strictly increase")
        if len(knots) - 1 != chi[-1] + k + 1:
            raise ValueError(f"need n = j_r + k + 1 = {chi[-1] + k + 1}, got {len(knots) - 1}")
        if any(b < a for a, b in zip(knots, knots[1:])):
            raise ValueError("knots must be non-decreasing")
        for j in chi:
            w = self.window(j)
            if w[0] == w[-1]:
                raise ValueError(f"B-spline {j} has zero-length support")

    @property
    def n(self) -> int:
        return len(self.knots) - 1

    @property
    def j_r(self) -> int:
        return self.index_sequence[-1]

    def window(self, j: int) -> tuple:
        return self.knots[j:j + self.degree + 2]

    def transformed(self, h=1, xi=0) -> FilterSpec:
        """Same filter over the knots ``h * t + xi``."""
        h, xi = to_rational(h), to_rational(xi)
        if h <= 0:
            raise ValueError("h must be positive")
        return FilterSpec(self.name, self.degree, self.reproduction_degree, self.index_sequence,
                          tuple(h * t + xi for t in self.knots), self.side, self.dg_degree)

    def lam(self, a, b, h) -> Fraction:
        """Shift constant: rightmost knot sits at ``a`` (left), leftmost at ``b`` (right)."""
        a, b, h = to_rational(a), to_rational(b), to_rational(h)
        if self.side == "L":
            return self.knots[-1] + a / h
        if self.side == "R":
            return self.knots[0] + b / h
        raise ValueError("symmetric filters are position independent; no shift constant")

    def bspline(self, j: int) -> PiecewisePoly:
        return bspline_pieces(self.window(j))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "degree": self.degree,
            "dg_degree": self.dg_degree,
            "reproduction_degree": self.reproduction_degree,
            "side": self.side,
            "index_sequence": list(self.index_sequence),
            "knots": [rat_str(t) for t in self.knots],
        }


@dataclass(frozen=True)
class ReproSystem:
    M: RatMatrix
    M_inv: RatMatrix
    c0: tuple


def build_reproduction_matrix(spec: FilterSpec) -> RatMatrix:
    """M[delta, j] = divided difference of x^(k+1+delta) over the j-th window."""
    r = spec.reproduction_degree
    return RatMatrix.from_rows(
        [[complete_homogeneous(spec.window(j), delta) for j in spec.index_sequence]
         for delta in range(r + 1)])


def kernel_coefficients(spec: FilterSpec) -> ReproSystem:
    M = build_reproduction_matrix(spec)
    M_inv = rat_inverse(M)
    return ReproSystem(M, M_inv, M_inv.col(0))


def pascal_shift_matrix(k: int, r: int, xi) -> RatMatrix:
    """Lower-triangular P with P[delta, beta] = C(delta+k+1, delta-beta) xi^(delta-beta)."""
    xi = to_rational(xi)
    return RatMatrix.from_rows(
        [[binom(delta + k + 1, delta - beta) * xi ** (delta - beta) if beta <= delta else 0
          for beta in range(r + 1)] for delta in range(r + 1)])


def signed_binomial_diag(k: int, r: int) -> RatMatrix:
    return RatMatrix.diag([(-1) ** ell * binom(ell + k + 1, ell) for ell in range(r + 1)])


def shifted_scaled_coefficients(spec: FilterSpec, h=1, system: ReproSystem | None = None) -> list:
    """Coefficients for knots ``h*t + xi`` as polynomials in ``xi``.

    Entry ``j`` (in index-sequence order) has degree at most r.
    """
    h = to_rational(h)
    if h <= 0:
        raise ValueError("h must be positive")
    system = system or kernel_coefficients(spec)
    k, r = spec.degree, spec.reproduction_degree
    weights = [(-1) ** ell * binom(ell + k + 1, ell) / h ** ell for ell in range(r + 1)]
    return [RatPoly([system.M_inv[j, ell] * weights[ell] for ell in range(r + 1)])
            for j in range(r + 1)]


def bspline_moments(spec: FilterSpec, max_power: int) -> list:
    """mom[j][m] = integral of B_j(t) t^m for the kernel's B-splines."""
    out = []
    for j in spec.index_sequence:
        pp = spec.bspline(j)
        row = []
        for m in range(max_power + 1):
            mono = RatPoly.monomial(m)
            row.append(PiecewisePoly(pp.breakpoints, [p * mono for p in pp.pieces]).integral())
        out.append(row)
    return out


def convolve_monomial(spec: FilterSpec, coeffs, delta: int, moments=None) -> RatPoly:
    """The kernel convolved with ``t -> t**delta``, as an exact polynomial in x."""
    moments = moments or bspline_moments(spec, delta)
    coeffs = [to_rational(c) for c in coeffs]
    out = []
    for p in range(delta + 1):
        m = delta - p
        s = sum((c * mom[m] for c, mom in zip(coeffs, moments)), Fraction(0))
        out.append(binom(delta, m) * (-1) ** m * s)
    return RatPoly(out)


def kernel_piecewise(spec: FilterSpec, coeffs) -> PiecewisePoly:
    """The kernel ``sum_j c_j B_j`` as one PiecewisePoly over the distinct knots."""
    bps = sorted(set(spec.knots))
    pieces = [RatPoly() for _ in bps[:-1]]
    for c, j in zip(coeffs, spec.index_sequence):
        pp = spec.bspline(j)
        for m, lo in enumerate(bps[:-1]):
            p = pp.piece_at(lo)
            if p is not None:
                pieces[m] = pieces[m] + p * to_rational(c)
    return PiecewisePoly(bps, pieces)


def _mirror(knots) -> tuple:
    return tuple(-t for t in reversed(knots))


def filter_catalog(name: str, d: int, side: str = "L") -> FilterSpec:
    """Named boundary and symmetric filters over prototype knots.

    ``d`` is the DG degree. Half-integer knots appear when 3d+1 (RS, RLKV,
    MULTIKNOT, SYMMETRIC) or 5d+1 (SRV) is odd; they are kept exact.
    """
    name = name.upper()
    if name not in CATALOG:
        raise ValueError(f"unknown filter {name!r}; expected one of {CATALOG}")
    if not isinstance(d, int) or d < 1:
        raise UnsupportedDegree(f"catalog filters need integer d >= 1, got {d!r}")
    if name == "SYMMETRIC":
        side = "sym"
    elif side not in ("L", "R"):
        raise ValueError(f"{name} is one-sided; side must be 'L' or 'R'")

    if name in ("RS", "SRV", "SYMMETRIC"):
        r = 4 * d if name == "SRV" else 2 * d
        mu = Fraction(r + d + 1, 2)
        knots = [-mu + i for i in range(r + d + 2)]
        return FilterSpec(name, d, r, tuple(range(r + 1)), tuple(knots), side, d)

    mu = Fraction(3 * d + 1, 2)
    if name == "RLKV":
        knots = [-mu + i for i in range(3 * d + 1)] + [mu] * (d + 1)
        chi = list(range(2 * d + 1)) + [3 * d]
        if side == "R":
            knots = _mirror(knots)
            chi = sorted(3 * d - j for j in chi)
        return FilterSpec(name, d, 2 * d + 1, tuple(chi), tuple(knots), side, d)

    knots = [-mu + i for i in range(3 * d)] + [mu - 1, mu - 1, mu, mu]
    if side == "R":
        knots = _mirror(knots)
    r = len(knots) - 3
    return FilterSpec(name, 1, r, tuple(range(r + 1)), tuple(knots), side, d)
