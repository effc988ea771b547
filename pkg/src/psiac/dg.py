"""DG solver for u_t + u_x = 0 with Bernstein-Bezier elements, upwind flux and RK4."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import UnstableStep
from .exact import RatPoly, binom, to_rational
from .splines import PiecewisePoly, bernstein_local, bernstein_mass_matrix

DEFAULT_CFL = 0.1


@dataclass(frozen=True)
class Mesh:
    """Uniform partition of [a, b] into N cells; endpoints kept exact."""

    a: Fraction
    b: Fraction
    N: int

    def __post_init__(self):
        object.__setattr__(self, "a", to_rational(self.a))
        object.__setattr__(self, "b", to_rational(self.b))
        if self.N < 1:
            raise ValueError("need at least one cell")
        if self.b <= self.a:
            raise ValueError("need a < b")

    @property
    def h(self) -> Fraction:
        return (self.b - self.a) / self.N

    @property
    def prototype_breakpoints(self) -> tuple:
        s0 = self.a / self.h
        return tuple(s0 + i for i in range(self.N + 1))

    @property
    def breakpoints(self) -> np.ndarray:
        return float(self.a) + float(self.h) * np.arange(self.N + 1)

    def local_to_x(self, cell, theta):
        """Physical coordinate of local position ``theta`` in ``cell`` (exact if inputs are)."""
        if isinstance(theta, (int, Fraction)) and isinstance(cell, (int, np.integer)):
            return self.a + self.h * (int(cell) + theta)
        return float(self.a) + float(self.h) * (np.asarray(cell) + np.asarray(theta, dtype=float))


@lru_cache(maxsize=None)
def bernstein_operators(d: int):
    """Float mass M[l, m] and stiffness S[l, m] = int B_m B_l' on [0, 1]."""
    mass = bernstein_mass_matrix(d).to_float()
    basis = [bernstein_local(d, ell) for ell in range(d + 1)]
    S = np.zeros((d + 1, d + 1))
    for ell in range(d + 1):
        dl = basis[ell].derivative()
        for m in range(d + 1):
            P = (dl * basis[m]).antiderivative()
            S[ell, m] = float(P(Fraction(1)) - P(Fraction(0)))
    return mass, S


def bernstein_values(d: int, theta) -> np.ndarray:
    """Rows of B_l(theta), shape (len(theta), d+1)."""
    theta = np.asarray(theta, dtype=float)
    ell = np.arange(d + 1)
    binoms = np.array([math.comb(d, i) for i in ell], dtype=float)
    return binoms * theta[:, None] ** ell * (1.0 - theta[:, None]) ** (d - ell)


@dataclass
class DGField:
    """Per-cell Bernstein-Bezier coefficients, shape (N, d+1).

    ``coeffs`` is normally float64; an object array of Fractions is accepted
    for exact experiments.
    """

    d: int
    coeffs: np.ndarray
    mesh: Mesh
    time: float = 0.0

    def __post_init__(self):
        if self.coeffs.shape != (self.mesh.N, self.d + 1):
            raise ValueError(f"coeffs shape {self.coeffs.shape} != {(self.mesh.N, self.d + 1)}")

    @property
    def is_exact(self) -> bool:
        return self.coeffs.dtype == object

    def flat(self) -> np.ndarray:
        """Coefficient vector in global order (d+1) * cell + ell."""
        return self.coeffs.reshape(-1)

    def sample(self, thetas) -> np.ndarray:
        """Values at local positions ``thetas`` in every cell, shape (N, len(thetas))."""
        B = bernstein_values(self.d, [float(t) for t in thetas])
        return np.asarray(self.coeffs, dtype=float) @ B.T

    def evaluate(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = (x - float(self.mesh.a)) / float(self.mesh.h)
        cell = np.clip(np.floor(y).astype(int), 0, self.mesh.N - 1)
        theta = y - cell
        B = bernstein_values(self.d, theta)
        return np.einsum("ij,ij->i", np.asarray(self.coeffs, dtype=float)[cell], B)

    def cell_poly(self, cell: int) -> PiecewisePoly:
        """Exact polynomial on one cell in physical coordinates."""
        a, h = self.mesh.a, self.mesh.h
        lo = a + h * cell
        # theta = (x - lo) / h
        theta = RatPoly([-lo / h, 1 / h])
        p = RatPoly()
        for ell in range(self.d + 1):
            c = to_rational(self.coeffs[cell, ell])
            if c:
                p = p + (theta ** ell) * ((1 - theta) ** (self.d - ell)) * (binom(self.d, ell) * c)
        return PiecewisePoly.single(lo, lo + h, p)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["cell", "l", "coefficient"])
            for i in range(self.mesh.N):
                for ell in range(self.d + 1):
                    w.writerow([i, ell, repr(float(self.coeffs[i, ell]))])


def gauss_legendre_unit(order: int):
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def l2_project(f: Callable, mesh: Mesh, d: int, qorder: int | None = None) -> DGField:
    """Cellwise L2 projection onto degree-d Bernstein polynomials."""
    qorder = qorder or d + 5
    nodes, weights = gauss_legendre_unit(qorder)
    B = bernstein_values(d, nodes)
    x = mesh.local_to_x(np.arange(mesh.N)[:, None], nodes[None, :])
    fx = np.asarray(f(x), dtype=float)
    # h cancels between the mass matrix and the load vector
    load = (fx * weights) @ B
    mass, _ = bernstein_operators(d)
    coeffs = np.linalg.solve(mass, load.T).T
    return DGField(d, coeffs, mesh, 0.0)


@dataclass
class Boundary:
    """Periodic, or Dirichlet inflow at x = a with value ``inflow(t)``."""

    kind: str = "periodic"
    inflow: Callable | None = None

    def __post_init__(self):
        if self.kind not in ("periodic", "dirichlet"):
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind == "dirichlet" and self.inflow is None:
            raise ValueError("dirichlet boundary needs an inflow function")


def advection_rhs(u: DGField, boundary: Boundary = Boundary(), t: float = 0.0) -> DGField:
    """du/dt for unit-speed advection, upwind flux (left trace at each interface)."""
    c = np.asarray(u.coeffs, dtype=float)
    mass, S = bernstein_operators(u.d)
    right_trace = c[:, -1]
    upstream = np.empty_like(right_trace)
    upstream[1:] = right_trace[:-1]
    if boundary.kind == "periodic":
        upstream[0] = right_trace[-1]
    else:
        upstream[0] = boundary.inflow(t)
    r = c @ S.T
    r[:, -1] -= right_trace
    r[:, 0] += upstream
    du = np.linalg.solve(mass, r.T).T / float(u.mesh.h)
    return DGField(u.d, du, u.mesh, t)


def integrate(u0: DGField, t_end: float, cfl: float = DEFAULT_CFL,
              boundary: Boundary = Boundary()) -> DGField:
    """Classical RK4 with dt = cfl * h; the final step lands on t_end."""
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    c = np.array(u0.coeffs, dtype=float)
    t = float(u0.time)
    if t_end == 0:
        return DGField(u0.d, c, u0.mesh, t)
    dt_max = cfl * float(u0.mesh.h)
    nsteps = max(1, math.ceil(t_end / dt_max - 1e-12))
    dt = t_end / nsteps
    mesh, d = u0.mesh, u0.d

    def f(coeffs, time):
        return advection_rhs(DGField(d, coeffs, mesh, time), boundary, time).coeffs

    t0 = t
    for step in range(nsteps):
        t = t0 + step * dt
        # blow-up is reported as UnstableStep below, not as numpy warnings
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = f(c, t)
            k2 = f(c + 0.5 * dt * k1, t + 0.5 * dt)
            k3 = f(c + 0.5 * dt * k2, t + 0.5 * dt)
            k4 = f(c + dt * k3, t + dt)
            c = c + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(c)):
            raise UnstableStep(f"non-finite coefficients at step {step + 1} (t={t + dt:g})")
    return DGField(d, c, mesh, t0 + t_end)


@dataclass(frozen=True)
class Example:
    """One of the two canonical advection test problems on [0, 1]."""

    ident: int
    t_end: float
    boundary_kind: str
    u0: Callable = field(repr=False)

    def exact(self, t: float) -> Callable:
        return lambda x: self.u0(np.asarray(x, dtype=float) - t)

    def boundary(self) -> Boundary:
        if self.boundary_kind == "periodic":
            return Boundary("periodic")
        return Boundary("dirichlet", inflow=lambda t: float(self.u0(-t)))

    def mesh(self, N: int) -> Mesh:
        return Mesh(Fraction(0), Fraction(1), N)


def _u0_example1(x):
    return 0.7 * np.sin(np.pi * np.sqrt(10.0 / 7.0) * x)


def _u0_example2(x):
    return np.sin(2 * np.pi * x)


EXAMPLES = {
    1: Example(1, 1.0 / 16.0, "dirichlet", _u0_example1),
    2: Example(2, 1.0, "periodic", _u0_example2),
}


def solve_example(ident: int, d: int, N: int, t_end: float | None = None,
                  cfl: float = DEFAULT_CFL) -> DGField:
    ex = EXAMPLES[ident]
    mesh = ex.mesh(N)
    u0 = l2_project(ex.u0, mesh, d)
    return integrate(u0, ex.t_end if t_end is None else t_end, cfl, ex.boundary())


def sample_thetas(points_per_cell: int) -> list:
    """Cell-midpoint sample positions (2q+1)/(2P), exact."""
    return [Fraction(2 * q + 1, 2 * points_per_cell) for q in range(points_per_cell)]


def quadrature_thetas(order: int, splits=(Fraction(0), Fraction(1, 2), Fraction(1))):
    """Gauss points on each sub-interval of [0, 1]; returns exact thetas, weights and
    sub-interval bounds (for restricting to a region)."""
    nodes, weights = gauss_legendre_unit(order)
    thetas, ws, bounds = [], [], []
    for lo, hi in zip(splits, splits[1:]):
        span = hi - lo
        for x, w in zip(nodes, weights):
            thetas.append(lo + span * Fraction(float(x)))
            ws.append(float(span) * w)
            bounds.append((lo, hi))
    return thetas, np.array(ws), bounds


def error_metrics(u, exact: Callable, points_per_cell: int = 20, region=None,
                  quad_order: int | None = None) -> dict:
    """Pointwise errors on a midpoint grid, composite-Gauss L2 and max-norm.

    ``u`` is anything with ``d``, ``mesh`` and ``sample(thetas)`` (DGField or
    FilteredField). ``region`` restricts to [lo, hi] in cell units
    (x = a + h * s); it must be aligned to half cells.
    """
    mesh = u.mesh
    N = mesh.N
    lo, hi = (Fraction(0), Fraction(N)) if region is None else (to_rational(region[0]), to_rational(region[1]))
    thetas = sample_thetas(points_per_cell)
    vals = u.sample(thetas)
    s = np.arange(N)[:, None] + np.array([float(t) for t in thetas])[None, :]
    x = mesh.local_to_x(np.arange(N)[:, None], np.array([float(t) for t in thetas])[None, :])
    err = np.abs(vals - exact(x))
    mask = (s >= float(lo)) & (s <= float(hi))

    qorder = quad_order or 2 * u.d + 4
    qt, qw, bounds = quadrature_thetas(qorder)
    qvals = u.sample(qt)
    qx = mesh.local_to_x(np.arange(N)[:, None], np.array([float(t) for t in qt])[None, :])
    qerr2 = (qvals - exact(qx)) ** 2
    keep = np.array([[lo <= m + b0 and m + b1 <= hi for (b0, b1) in bounds] for m in range(N)])
    # points outside the region may be NaN (no filter there); select, don't multiply
    l2 = math.sqrt(float(mesh.h) * float(np.sum(np.where(keep, qerr2 * qw[None, :], 0.0))))
    return {
        "x": x[mask],
        "pointwise": err[mask],
        "L2": l2,
        "Linf": float(err[mask].max()) if mask.any() else 0.0,
    }


def fit_order(hs, errors) -> float:
    """Least-squares slope of log(error) against log(h)."""
    lh = np.log(np.asarray(hs, dtype=float))
    le = np.log(np.asarray(errors, dtype=float))
    return float(np.polyfit(lh, le, 1)[0])
