"""Factored PSIAC convolution of DG output and the assembled filtered field.

Near a boundary the filtered DG output is the polynomial

    u_I . Q . diag(h^-(0:r)) . ((x - h*lam)^(0:r))^T,   Q = T . A . M^-1 . D,

where T holds exact integrals of DG basis functions against the reversed,
shifted kernel B-splines, A reverses columns and D = diag((-1)^l C(l+k+1, l)).
Only the last contraction ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

import numpy as np

from .dg import DGField, Mesh
from .errors import MeshTooCoarse, OutOfRegion
from .exact import RatMatrix, RatPoly, binom, poly_eval, rat_str, to_rational
from .kernels import (FilterSpec, ReproSystem, filter_catalog, kernel_coefficients,
                      signed_binomial_diag)
from .splines import (PiecewisePoly, bernstein_basis, bernstein_mass_matrix, bspline_pieces,
                      integrate_piecewise_product, uniform_bspline_bb_coeffs)


def symmetric_halfwidth(d: int) -> Fraction:
    """Half support (in cells) of the degree-d symmetric kernel: (3d+1)/2."""
    return Fraction(3 * d + 1, 2)


def _column_knots(spec: FilterSpec, p: int, lam) -> tuple:
    """Knots of T's p-th column: lam - t over the window of B-spline chi[r-p], reversed."""
    j = spec.index_sequence[spec.reproduction_degree - p]
    return tuple(lam - t for t in reversed(spec.window(j)))


def build_T_general(spec: FilterSpec, lam, breakpoints, d: int):
    """T[i, p] = int phi_i(s) B(s | lam - t_{window(chi[r-p])}) ds on prototype breakpoints.

    ``breakpoints`` may be any increasing rational sequence; phi_i are the
    degree-d Bernstein polynomials of each cell in its local variable, globally indexed
    (d+1)*cell + ell. Returns ``(T, rows)`` where ``rows`` lists the basis
    indices whose support overlaps the filter window.
    """
    lam = to_rational(lam)
    bps = [to_rational(s) for s in breakpoints]
    lo, hi = lam - spec.knots[-1], lam - spec.knots[0]
    cells = [c for c in range(len(bps) - 1) if bps[c] < hi and bps[c + 1] > lo]
    rows = [(d + 1) * c + ell for c in cells for ell in range(d + 1)]
    cols = [bspline_pieces(_column_knots(spec, p, lam)) for p in range(spec.reproduction_degree + 1)]
    entries = []
    for c in cells:
        # DG coefficients live in the local variable, so normalize by the cell length
        scale = 1 / (bps[c + 1] - bps[c]) ** d
        for phi in bernstein_basis(d, c, bps):
            entries.extend(integrate_piecewise_product(phi.scale(scale), B, lo, hi) for B in cols)
    return RatMatrix(len(rows), len(cols), entries), rows


def window_cells(spec: FilterSpec) -> int:
    """Smallest integer >= t_n - t_0."""
    return ceil(spec.knots[-1] - spec.knots[0])


def build_T_uniform(spec: FilterSpec, side: str | None = None, d: int | None = None) -> RatMatrix:
    """T on unit cells counted from the boundary, rows ordered left to right.

    Left: cells [i, i+1] from the left endpoint against B(. | t_n - t_rev).
    Right: mirrored coordinates from the right endpoint; cell i of the row
    ordering is mirrored cell n0-1-i and Bernstein index ell becomes d-ell.
    """
    side = side or spec.side
    d = spec.dg_degree if d is None else d
    r = spec.reproduction_degree
    n0 = window_cells(spec)
    t = spec.knots
    cols = []
    for p in range(r + 1):
        j = spec.index_sequence[r - p]
        w = spec.window(j)
        if side == "L":
            cols.append(bspline_pieces(tuple(t[-1] - v for v in reversed(w))))
        elif side == "R":
            cols.append(bspline_pieces(tuple(v - t[0] for v in w)))
        else:
            raise ValueError("build_T_uniform needs side 'L' or 'R'")
    entries = []
    for i in range(n0):
        cell = i if side == "L" else n0 - 1 - i
        basis = bernstein_basis(d, cell)
        for ell in range(d + 1):
            phi = basis[ell] if side == "L" else basis[d - ell]
            entries.extend(integrate_piecewise_product(phi, B) for B in cols)
    return RatMatrix(n0 * (d + 1), r + 1, entries)


def _banded_T(d: int, columns_start, extra_first: bool) -> RatMatrix:
    Md = bernstein_mass_matrix(d)
    bb = uniform_bspline_bb_coeffs(d)
    blocks = [Md @ RatMatrix.column(bb.col(rho)) for rho in range(d + 1)]
    ncols = len(columns_start) + (1 if extra_first else 0)
    nblocks = max(columns_start) + d + 1
    rows = [[Fraction(0)] * ncols for _ in range(nblocks * (d + 1))]
    offset = 0
    if extra_first:
        first = Md.col(0)
        for ell in range(d + 1):
            rows[ell][0] = (d + 1) * first[ell]
        offset = 1
    for col, start in enumerate(columns_start):
        for rho in range(d + 1):
            blk = blocks[rho]
            for ell in range(d + 1):
                rows[(start + rho) * (d + 1) + ell][col + offset] = blk[ell, 0]
    return RatMatrix.from_rows(rows)


def closed_form_T_srv(d: int, side: str = "L") -> RatMatrix:
    """Banded block form: column j holds M_d b_rho in row block j + rho."""
    T = _banded_T(d, list(range(4 * d + 1)), extra_first=False)
    return T if side == "L" else T.reverse_rows().reverse_cols()


def closed_form_T_rlkv(d: int, side: str = "L") -> RatMatrix:
    """SRV-like band for the 2d+1 uniform B-splines, plus (d+1) M_d[:, 0] first."""
    T = _banded_T(d, list(range(2 * d + 1)), extra_first=True)
    return T if side == "L" else T.reverse_rows().reverse_cols()


def build_Q(spec: FilterSpec, T: RatMatrix, system: ReproSystem | None = None) -> RatMatrix:
    """Q = T . A . M^-1 . diag((-1)^l C(l+k+1, l))."""
    system = system or kernel_coefficients(spec)
    return T.reverse_cols() @ system.M_inv @ signed_binomial_diag(spec.degree, spec.reproduction_degree)


@dataclass(frozen=True)
class ConvolutionMatrix:
    """Precomputed Q for one boundary of one mesh."""

    Q: RatMatrix
    rows: tuple
    lam: Fraction
    h: Fraction
    side: str
    spec: FilterSpec
    region: tuple  # (lo, hi) in physical coordinates

    @property
    def r(self) -> int:
        return self.spec.reproduction_degree

    def in_region(self, x) -> bool:
        lo, hi = self.region
        if self.side == "L":
            return lo <= x < hi
        return lo < x <= hi


def convolution_matrix(spec: FilterSpec, mesh: Mesh, d: int, general: bool = False) -> ConvolutionMatrix:
    """Q for ``spec`` applied at its side of ``mesh`` (DG degree ``d``)."""
    if spec.side not in ("L", "R"):
        raise ValueError("convolution_matrix needs a one-sided filter")
    n0 = window_cells(spec)
    if n0 > mesh.N:
        raise MeshTooCoarse(f"{spec.name} spans {n0} cells but the mesh has {mesh.N}")
    h = mesh.h
    lam = spec.lam(mesh.a, mesh.b, h)
    if general:
        T, rows = build_T_general(spec, lam, mesh.prototype_breakpoints, d)
    else:
        T = build_T_uniform(spec, spec.side, d)
        first = 0 if spec.side == "L" else mesh.N - n0
        rows = list(range((d + 1) * first, (d + 1) * (first + n0)))
    width = h * symmetric_halfwidth(d)
    region = (mesh.a, mesh.a + width) if spec.side == "L" else (mesh.b - width, mesh.b)
    return ConvolutionMatrix(build_Q(spec, T), tuple(rows), lam, h, spec.side, spec, region)


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction))


@dataclass(frozen=True)
class FilteredBoundaryPoly:
    """Filtered output near one boundary: sum_l coefficients[l] (x - h*lam)^l.

    ``local`` holds the same polynomial re-expanded exactly in y = (x - anchor)/h
    with the anchor at the domain endpoint; floating evaluation uses it to
    avoid cancellation between large monomials.
    """

    coefficients: tuple
    lam: Fraction
    h: Fraction
    valid_x_range: tuple
    side: str
    anchor: Fraction
    local: tuple

    @property
    def degree_bound(self) -> int:
        return len(self.coefficients) - 1

    def _check(self, x):
        lo, hi = self.valid_x_range
        ok = (lo <= x < hi) if self.side == "L" else (lo < x <= hi)
        if not ok:
            raise OutOfRegion(f"x={x} outside the {self.side} boundary region [{lo}, {hi}]")

    def polynomial(self) -> RatPoly:
        """Exact polynomial in x."""
        shift = self.h * self.lam
        return RatPoly(self.coefficients).compose_linear(1, -shift)

    def __call__(self, x, order: int = 0, check: bool = True):
        if check:
            self._check(x)
        if _is_exact(x):
            p = RatPoly(self.coefficients).derivative(order)
            return poly_eval(p, to_rational(x) - self.h * self.lam)
        y = (float(x) - float(self.anchor)) / float(self.h)
        p = RatPoly(self.local).derivative(order)
        acc = 0.0
        for c in reversed(p.coeffs):
            acc = acc * y + float(c)
        return acc / float(self.h) ** order

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "lambda": rat_str(self.lam),
            "h": rat_str(self.h),
            "valid_x_range": [rat_str(v) for v in self.valid_x_range],
            "coefficients": [rat_str(c) for c in self.coefficients],
        }


def boundary_poly(u_I, cm: ConvolutionMatrix) -> FilteredBoundaryPoly:
    """Contract DG coefficients u_I (floats are taken exactly) with Q."""
    u = [to_rational(v) for v in u_I]
    if len(u) != cm.Q.rows:
        raise ValueError(f"u_I has {len(u)} entries, Q has {cm.Q.rows} rows")
    r = cm.r
    uq = [sum((u[i] * cm.Q[i, ell] for i in range(len(u)) if u[i]), Fraction(0)) for ell in range(r + 1)]
    coeffs = tuple(c / cm.h ** ell for ell, c in enumerate(uq))
    anchor = cm.region[0] if cm.side == "L" else cm.region[1]
    # (x - h lam)/h = y + (anchor/h - lam)
    local = RatPoly(uq).compose_linear(1, anchor / cm.h - cm.lam).coeffs
    local = tuple(local) + (Fraction(0),) * (r + 1 - len(local))
    return FilteredBoundaryPoly(coeffs, cm.lam, cm.h, cm.region, cm.side, anchor, local)


def filter_eval(u_I, cm: ConvolutionMatrix, x):
    """Filtered value at x; exact when u_I and x are rational."""
    return filter_deriv(u_I, cm, x, 0)


def filter_deriv(u_I, cm: ConvolutionMatrix, x, order: int):
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    return boundary_poly(u_I, cm)(x, order)


def dg_window_poly(u: DGField, lo, hi) -> PiecewisePoly:
    """Exact piecewise form of the DG output restricted to cells meeting [lo, hi]."""
    a, h, N = u.mesh.a, u.mesh.h, u.mesh.N
    c0 = max(0, int((to_rational(lo) - a) // h))
    c1 = min(N - 1, int((to_rational(hi) - a) // h))
    bps = [a + h * c for c in range(c0, c1 + 2)]
    pieces = [u.cell_poly(c).pieces[0] for c in range(c0, c1 + 1)]
    return PiecewisePoly(bps, pieces)


def symmetric_filter_eval(u: DGField, x, spec: FilterSpec | None = None,
                          system: ReproSystem | None = None) -> Fraction:
    """Exact convolution of the h-scaled symmetric kernel with the DG output at x."""
    spec = spec or filter_catalog("SYMMETRIC", u.d)
    system = system or kernel_coefficients(spec)
    x = to_rational(x)
    h = u.mesh.h
    lo, hi = x - h * spec.knots[-1], x - h * spec.knots[0]
    if lo < u.mesh.a or hi > u.mesh.b:
        raise OutOfRegion(f"symmetric kernel at x={x} leaves [{u.mesh.a}, {u.mesh.b}]")
    data = dg_window_poly(u, lo, hi)
    total = Fraction(0)
    # coefficients for knots h*t are the prototype ones (first column unchanged by scaling)
    for c, j in zip(system.c0, spec.index_sequence):
        B = bspline_pieces(tuple(x - h * v for v in reversed(spec.window(j))))
        total += c * integrate_piecewise_product(data, B)
    return total


class InteriorFilter:
    """Symmetric filter evaluated at fixed local positions of every cell.

    For x = a + h (m + theta) the filtered value is sum_o u[m+o] . W_o(theta)
    with exact weights W_o computed on unit cells and cached per theta.
    """

    def __init__(self, d: int, spec: FilterSpec | None = None):
        self.d = d
        self.spec = spec or filter_catalog("SYMMETRIC", d)
        self.c0 = kernel_coefficients(self.spec).c0
        self._cache = {}

    @property
    def halfwidth(self) -> Fraction:
        return max(self.spec.knots[-1], -self.spec.knots[0])

    def weights(self, theta) -> dict:
        theta = to_rational(theta)
        if theta in self._cache:
            return self._cache[theta]
        spec, d = self.spec, self.d
        lo, hi = theta - spec.knots[-1], theta - spec.knots[0]
        Bs = [bspline_pieces(tuple(theta - v for v in reversed(spec.window(j))))
              for j in spec.index_sequence]
        out = {}
        for o in range(int(lo // 1), int(-(-hi // 1))):
            row = []
            for phi in bernstein_basis(d, o):
                row.append(sum((c * integrate_piecewise_product(phi, B) for c, B in zip(self.c0, Bs)),
                               Fraction(0)))
            if any(row):
                out[o] = row
        self._cache[theta] = out
        return out

    def value(self, u: DGField, cell: int, theta):
        """Filtered value at one point; exact if u is exact."""
        total = 0
        for o, w in self.weights(theta).items():
            m = cell + o
            if not 0 <= m < u.mesh.N:
                raise OutOfRegion(f"cell {cell} theta {theta}: kernel leaves the domain")
            for ell in range(self.d + 1):
                total += to_rational(u.coeffs[m, ell]) * w[ell] if u.is_exact else float(u.coeffs[m, ell]) * float(w[ell])
        return total

    def sample(self, u: DGField, thetas) -> np.ndarray:
        """Float values for every (cell, theta); NaN where the kernel leaves the domain."""
        N = u.mesh.N
        c = np.asarray(u.coeffs, dtype=float)
        out = np.full((N, len(thetas)), np.nan)
        for q, theta in enumerate(thetas):
            W = self.weights(theta)
            omin, omax = min(W), max(W)
            m0, m1 = max(0, -omin), min(N, N - omax)
            if m1 <= m0:
                continue
            acc = np.zeros(m1 - m0)
            for o, w in W.items():
                acc += c[m0 + o:m1 + o] @ np.array([float(v) for v in w])
            out[m0:m1, q] = acc
        return out


@dataclass
class FilteredField:
    """Filtered DG output: PSIAC polynomials near the ends, symmetric filter inside.

    Regions in cell units s = (x - a)/h: left [0, mu), interior [mu, N - mu],
    right (N - mu, N] with mu = (3d+1)/2. Nothing is blended at the seams.
    Either boundary may be None (interior-only filtering).
    """

    u: DGField
    left: FilteredBoundaryPoly | None
    right: FilteredBoundaryPoly | None
    interior: InteriorFilter

    @property
    def mesh(self) -> Mesh:
        return self.u.mesh

    @property
    def d(self) -> int:
        return self.u.d

    @property
    def mu(self) -> Fraction:
        return symmetric_halfwidth(self.u.d)

    def region_of(self, s) -> str:
        if s < self.mu:
            return "L"
        if s > self.mesh.N - self.mu:
            return "R"
        return "I"

    def evaluate_at(self, x):
        """Value at one point (exact when x and the DG data are rational)."""
        x = to_rational(x) if _is_exact(x) else x
        mesh = self.mesh
        s = (to_rational(x) - mesh.a) / mesh.h
        reg = self.region_of(s)
        if reg in ("L", "R"):
            poly = self.left if reg == "L" else self.right
            if poly is None:
                raise OutOfRegion(f"no boundary filter configured for side {reg}")
            return poly(x if _is_exact(x) else float(x))
        cell = min(int(s // 1), mesh.N - 1)
        return self.interior.value(self.u, cell, s - cell)

    def sample(self, thetas) -> np.ndarray:
        """Float values at a + h (m + theta) for every cell m; NaN where no filter applies."""
        mesh = self.mesh
        out = self.interior.sample(self.u, thetas)
        for m in range(mesh.N):
            for q, theta in enumerate(thetas):
                reg = self.region_of(m + to_rational(theta))
                if reg == "I":
                    continue
                poly = self.left if reg == "L" else self.right
                if poly is None:
                    out[m, q] = np.nan
                else:
                    out[m, q] = poly(float(mesh.local_to_x(m, to_rational(theta))), check=False)
        return out

    def to_json(self, thetas=None) -> dict:
        mesh = self.mesh
        mu = self.mu
        doc = {
            "d": self.d,
            "N": mesh.N,
            "a": rat_str(mesh.a),
            "b": rat_str(mesh.b),
            "region_breakpoints": [rat_str(v) for v in
                                   (mesh.a, mesh.a + mesh.h * mu, mesh.b - mesh.h * mu, mesh.b)],
            "left": self.left.to_json() if self.left else None,
            "right": self.right.to_json() if self.right else None,
        }
        if thetas is not None:
            vals = self.interior.sample(self.u, thetas)
            xs = mesh.local_to_x(np.arange(mesh.N)[:, None], np.array([float(t) for t in thetas])[None, :])
            ok = ~np.isnan(vals)
            doc["interior_samples"] = [[float(a), float(b)] for a, b in zip(xs[ok], vals[ok])]
        return doc


def filter_field(u: DGField, boundary: str | None = "SRV", general: bool = False,
                 interior: InteriorFilter | None = None,
                 matrices: tuple | None = None) -> FilteredField:
    """Filter a DG field with a named boundary family on both sides.

    ``matrices`` may carry precomputed (left, right) ConvolutionMatrix objects
    for the same mesh and degree.
    """
    mesh, d = u.mesh, u.d
    interior = interior or InteriorFilter(d)
    if 2 * symmetric_halfwidth(d) > mesh.N:
        raise MeshTooCoarse(f"symmetric kernel spans {2 * symmetric_halfwidth(d)} cells, mesh has {mesh.N}")
    if boundary is None:
        return FilteredField(u, None, None, interior)
    if matrices is None:
        matrices = tuple(convolution_matrix(filter_catalog(boundary, d, side), mesh, d, general)
                         for side in ("L", "R"))
    flat = u.flat()
    polys = [boundary_poly([flat[i] for i in cm.rows], cm) for cm in matrices]
    return FilteredField(u, polys[0], polys[1], interior)
