"""Per-point numerical filtering in double precision (the baseline being replaced).

For every evaluation point the kernel's reproduction matrix is assembled by Gauss
quadrature, solved by LU with partial pivoting, and the kernel is convolved
with the DG output by Gauss quadrature again. No tolerance or refinement is
applied on purpose: ill-conditioning shows up as noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np
import scipy.linalg

from .dg import DGField, Mesh
from .kernels import FilterSpec


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, f, lo: float, hi: float) -> float:
        half = 0.5 * (hi - lo)
        x = 0.5 * (hi + lo) + half * self.nodes
        return half * float(np.dot(self.weights, f(x)))


def gauss_legendre(order: int) -> QuadratureRule:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return QuadratureRule(nodes, weights, order)


def bspline_float(x, knots) -> np.ndarray:
    """Unit-integral B-spline in double precision by Cox-de Boor."""
    t = np.asarray(knots, dtype=float)
    x = np.asarray(x, dtype=float)
    k = len(t) - 2
    N = [((t[i] <= x) & (x < t[i + 1])).astype(float) for i in range(k + 1)]
    for deg in range(1, k + 1):
        nxt = []
        for i in range(k + 1 - deg):
            term = np.zeros_like(x)
            if t[i + deg] != t[i]:
                term = term + (x - t[i]) / (t[i + deg] - t[i]) * N[i]
            if t[i + deg + 1] != t[i + 1]:
                term = term + (t[i + deg + 1] - x) / (t[i + deg + 1] - t[i + 1]) * N[i + 1]
            nxt.append(term)
        N = nxt
    return N[0] * (k + 1) / (t[-1] - t[0])


def quadrature_order(spec: FilterSpec, d: int) -> int:
    # k + d + 2 covers the convolution integrand; moments of degree k + r may need more
    return max(spec.degree + d + 2, ceil((spec.degree + spec.reproduction_degree + 1) / 2))


def _shift(spec: FilterSpec, mesh: Mesh, x: float) -> float:
    if spec.side == "sym":
        return 0.0
    return x - float(mesh.h) * float(spec.lam(mesh.a, mesh.b, mesh.h))


def kernel_knots(spec: FilterSpec, mesh: Mesh, x: float) -> np.ndarray:
    return float(mesh.h) * np.array([float(t) for t in spec.knots]) + _shift(spec, mesh, x)


def _nodes_on(breaks, rule: QuadratureRule):
    breaks = np.asarray(breaks, dtype=float)
    lo, hi = breaks[:-1], breaks[1:]
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    half = 0.5 * (hi - lo)
    x = (0.5 * (hi + lo))[:, None] + half[:, None] * rule.nodes[None, :]
    w = half[:, None] * rule.weights[None, :]
    return x.ravel(), w.ravel()


def numeric_reproduction_matrix(spec: FilterSpec, knots: np.ndarray, x: float,
                                rule: QuadratureRule) -> np.ndarray:
    """M[delta, j] = int B_j(s) (x - s)^delta ds by quadrature on each knot interval.

    Rows are the reproduction conditions sum_j c_j M[delta, j] = x^delta written
    in absolute coordinates, as the per-point approach does.
    """
    k, r = spec.degree, spec.reproduction_degree
    M = np.empty((r + 1, r + 1))
    for col, j in enumerate(spec.index_sequence):
        w_knots = knots[j:j + k + 2]
        s, w = _nodes_on(w_knots, rule)
        B = bspline_float(s, w_knots)
        for delta in range(r + 1):
            M[delta, col] = np.dot(w, B * (x - s) ** delta)
    return M


def numeric_coefficients(spec: FilterSpec, knots: np.ndarray, x: float, rule: QuadratureRule) -> np.ndarray:
    M = numeric_reproduction_matrix(spec, knots, x, rule)
    rhs = float(x) ** np.arange(spec.reproduction_degree + 1)
    return scipy.linalg.lu_solve(scipy.linalg.lu_factor(M, check_finite=False), rhs, check_finite=False)


def numeric_filter_point(spec: FilterSpec, u: DGField, x: float) -> float:
    """Filtered value at x computed the numerical way, entirely in double."""
    x = float(x)
    mesh = u.mesh
    rule = gauss_legendre(quadrature_order(spec, u.d))
    knots = kernel_knots(spec, mesh, x)
    c = numeric_coefficients(spec, knots, x, rule)
    dg_breaks = x - mesh.breakpoints
    inside = dg_breaks[(dg_breaks > knots[0]) & (dg_breaks < knots[-1])]
    breaks = np.unique(np.concatenate([knots, inside]))
    s, w = _nodes_on(breaks, rule)
    data = u.evaluate(x - s)
    k = spec.degree
    kernel = np.zeros_like(s)
    for cj, j in zip(c, spec.index_sequence):
        kernel += cj * bspline_float(s, knots[j:j + k + 2])
    return float(np.dot(w, data * kernel))


def condition_number(A) -> float:
    """1-norm condition number of a dense matrix."""
    return float(np.linalg.cond(np.asarray(A, dtype=float), 1))


def condition_estimate(spec: FilterSpec, mesh: Mesh, x: float, d: int | None = None) -> float:
    """1-norm condition of the double-precision moment matrix used at x."""
    d = spec.dg_degree if d is None else d
    rule = gauss_legendre(quadrature_order(spec, d))
    return condition_number(numeric_reproduction_matrix(spec, kernel_knots(spec, mesh, float(x)), float(x), rule))


class LegacyFilteredField:
    """Legacy counterpart of FilteredField with the same regions and sampling API.

    Boundary regions use the one-sided ``boundary`` family, the interior the
    symmetric kernel; every point is computed from scratch in double.
    """

    def __init__(self, u: DGField, boundary: str | None = "SRV"):
        from .apply import symmetric_halfwidth
        from .kernels import filter_catalog

        self.u = u
        self.mu = symmetric_halfwidth(u.d)
        self.specs = {"I": filter_catalog("SYMMETRIC", u.d)}
        if boundary is not None:
            self.specs["L"] = filter_catalog(boundary, u.d, "L")
            self.specs["R"] = filter_catalog(boundary, u.d, "R")

    @property
    def mesh(self) -> Mesh:
        return self.u.mesh

    @property
    def d(self) -> int:
        return self.u.d

    def region_of(self, s) -> str:
        if s < self.mu:
            return "L"
        if s > self.mesh.N - self.mu:
            return "R"
        return "I"

    def evaluate_at(self, x) -> float:
        mesh = self.mesh
        s = (float(x) - float(mesh.a)) / float(mesh.h)
        spec = self.specs.get(self.region_of(s))
        if spec is None:
            return float("nan")
        return numeric_filter_point(spec, self.u, x)

    def sample(self, thetas) -> np.ndarray:
        mesh = self.mesh
        out = np.empty((mesh.N, len(thetas)))
        for m in range(mesh.N):
            for q, theta in enumerate(thetas):
                out[m, q] = self.evaluate_at(float(mesh.local_to_x(m, float(theta))))
        return out
