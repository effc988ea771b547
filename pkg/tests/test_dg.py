import csv

import numpy as np
import pytest
import scipy.linalg

from psiac.dg import (EXAMPLES, Boundary, DGField, Mesh, advection_rhs, error_metrics, fit_order,
                      gauss_legendre_unit, integrate, l2_project, solve_example)
from psiac.errors import UnstableStep


def test_mesh_basics():
    mesh = Mesh(0, 2, 8)
    assert mesh.h == 0.25
    assert mesh.prototype_breakpoints[0] * mesh.h == mesh.a
    assert mesh.prototype_breakpoints[-1] * mesh.h == mesh.b
    with pytest.raises(ValueError):
        Mesh(0, 1, 0)


def test_projection_examples():
    mesh = Mesh(0, 1, 5)
    u = l2_project(lambda x: np.ones_like(x), mesh, 3)
    assert np.allclose(u.coeffs, 1, atol=1e-14)
    u = l2_project(lambda x: x, Mesh(0, 1, 1), 1)
    assert np.allclose(u.coeffs, [[0, 1]], atol=1e-14)


def test_projection_residual_orthogonal():
    mesh = Mesh(0, 1, 4)
    u = l2_project(lambda x: x ** 2, mesh, 1)
    nodes, weights = gauss_legendre_unit(6)
    from psiac.dg import bernstein_values
    B = bernstein_values(1, nodes)
    for cell in range(mesh.N):
        x = mesh.local_to_x(cell, nodes)
        resid = u.coeffs[cell] @ B.T - x ** 2
        assert np.all(np.abs(B.T @ (weights * resid)) < 1e-12)


@pytest.mark.parametrize("d", [0, 1, 2, 3])
def test_constant_is_steady(d):
    mesh = Mesh(0, 1, 6)
    u = DGField(d, np.full((6, d + 1), 2.5), mesh)
    assert np.max(np.abs(advection_rhs(u).coeffs)) < 1e-12


def test_single_cell_finite_volume():
    mesh = Mesh(0, 1, 4)
    u = DGField(0, np.array([[1.0], [2.0], [0.5], [3.0]]), mesh)
    du = advection_rhs(u, Boundary("dirichlet", inflow=lambda t: 4.0)).coeffs[:, 0]
    assert np.allclose(du, [(4 - 1) / 0.25, (1 - 2) / 0.25, (2 - 0.5) / 0.25, (0.5 - 3) / 0.25])


def _l2(u):
    nodes, weights = gauss_legendre_unit(u.d + 2)
    vals = u.sample(nodes)
    return float(np.sum(vals ** 2 * weights) * float(u.mesh.h))


def test_upwind_energy_decreases():
    mesh = Mesh(0, 1, 10)
    u = l2_project(lambda x: np.sin(2 * np.pi * x), mesh, 2)
    v = integrate(u, 0.01, cfl=0.1)
    assert _l2(v) <= _l2(u)


def test_periodic_conservation():
    mesh = Mesh(0, 1, 12)
    u = l2_project(lambda x: np.exp(np.sin(2 * np.pi * x)), mesh, 2)
    v = integrate(u, 0.37)
    avg = lambda w: w.coeffs.mean(axis=1).sum()  # Bernstein cell average is the coefficient mean
    assert abs(avg(v) - avg(u)) <= 1e-12 * abs(avg(u))


def test_zero_time_returns_input():
    mesh = Mesh(0, 1, 5)
    u = l2_project(np.cos, mesh, 1)
    assert np.array_equal(integrate(u, 0.0).coeffs, u.coeffs)


def test_unstable_step_raises():
    mesh = Mesh(0, 1, 10)
    u = l2_project(lambda x: np.sin(2 * np.pi * x), mesh, 3)
    with pytest.raises(UnstableStep):
        integrate(u, 200.0, cfl=5.0)


def test_rk4_temporal_order():
    mesh = Mesh(0, 1, 6)
    d = 1
    u0 = l2_project(lambda x: np.sin(2 * np.pi * x), mesh, d)
    n = mesh.N * (d + 1)
    L = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1
        L[:, i] = advection_rhs(DGField(d, e.reshape(mesh.N, d + 1), mesh)).flat()
    exact = scipy.linalg.expm(L) @ u0.flat()
    errs = [np.max(np.abs(integrate(u0, 1.0, cfl=c).flat() - exact)) for c in (0.4, 0.2)]
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.15)


def test_example_exact_solutions():
    x = np.linspace(0, 1, 7)
    ex1 = EXAMPLES[1]
    assert ex1.t_end == 1 / 16
    assert np.allclose(ex1.exact(ex1.t_end)(x), 0.7 * np.sin(np.pi * np.sqrt(10 / 7) * (x - 1 / 16)))
    ex2 = EXAMPLES[2]
    assert np.allclose(ex2.exact(1.0)(x), np.sin(2 * np.pi * x))


@pytest.mark.parametrize("ident", [1, 2])
@pytest.mark.parametrize("d", [1, 2])
def test_dg_convergence(ident, d):
    ex = EXAMPLES[ident]
    Ns = (10, 20, 40)
    errs = [error_metrics(solve_example(ident, d, N), ex.exact(ex.t_end))["L2"] for N in Ns]
    assert fit_order([1 / N for N in Ns], errs) == pytest.approx(d + 1, abs=0.3)


def test_projection_convergence():
    f = lambda x: np.exp(x) * np.cos(3 * x)
    for d in (1, 2, 3):
        Ns = (8, 16, 32)
        errs = [error_metrics(l2_project(f, Mesh(0, 1, N), d), f)["L2"] for N in Ns]
        assert fit_order([1 / N for N in Ns], errs) == pytest.approx(d + 1, abs=0.2)


def test_error_metrics_exact_cases():
    mesh = Mesh(0, 1, 4)
    u = DGField(0, np.full((4, 1), 3.0), mesh)
    m = error_metrics(u, lambda x: np.full_like(x, 3.0))
    assert m["L2"] == 0 and m["Linf"] == 0
    assert len(m["x"]) == 4 * 20
    lin = l2_project(lambda x: 2 * x - 1, mesh, 1)
    assert error_metrics(lin, lambda x: 2 * x - 1)["Linf"] <= 1e-12


def test_csv_export(tmp_path):
    mesh = Mesh(0, 1, 3)
    u = l2_project(np.sin, mesh, 2)
    u.write_csv(tmp_path / "u.csv")
    rows = list(csv.reader(open(tmp_path / "u.csv")))
    assert rows[0] == ["cell", "l", "coefficient"]
    assert len(rows) == 1 + 3 * 3
    assert float(rows[5][2]) == u.coeffs[1, 1]


def test_evaluate_matches_sample():
    mesh = Mesh(0, 1, 5)
    u = l2_project(np.exp, mesh, 3)
    thetas = [0.1, 0.5, 0.9]
    x = mesh.local_to_x(np.arange(5)[:, None], np.array(thetas)[None, :])
    assert np.allclose(u.evaluate(x.ravel()).reshape(5, 3), u.sample(thetas), atol=1e-15)
