import numpy as np
import pytest

from psiac.apply import filter_field, symmetric_halfwidth
from psiac.dg import EXAMPLES, Mesh, l2_project
from psiac.kernels import filter_catalog
from psiac.legacy import (LegacyFilteredField, bspline_float, condition_estimate, condition_number,
                          gauss_legendre, numeric_filter_point)
from psiac.splines import bspline_eval


@pytest.mark.parametrize("order", range(1, 16))
def test_quadrature_exactness(order):
    rule = gauss_legendre(order)
    p = 2 * order - 1
    want = 0.0 if p % 2 else 2.0 / (p + 1)
    assert abs(rule.integrate(lambda x: x ** p, -1.0, 1.0) - want) <= 1e-13
    assert abs(rule.integrate(lambda x: x ** (p - 1), -1.0, 1.0) - 2.0 / p) <= 1e-13


def test_float_bspline_matches_exact():
    for knots in [(0, 1, 2), (0, 0, 1), (-2, -1, 0, 1, 1, 2), (0, 0.5, 1.5, 3)]:
        for x in (-0.3, 0.0, 0.25, 1.0, 1.7, 2.9):
            assert bspline_float(x, knots) == pytest.approx(float(bspline_eval(x, knots)), abs=1e-14)


def test_constant_reproduction():
    mesh = Mesh(0, 1, 20)
    for d in (1, 2):
        u = l2_project(lambda x: np.ones_like(x), mesh, d)
        for name in ("RS", "SRV", "RLKV", "MULTIKNOT"):
            for side, x in (("L", 0.0), ("L", 0.02), ("R", 0.99), ("R", 1.0)):
                assert abs(numeric_filter_point(filter_catalog(name, d, side), u, x) - 1) <= 1e-10


def _boundary_points(mesh, d, count=9):
    mu = float(symmetric_halfwidth(d))
    h = float(mesh.h)
    s = np.linspace(0, mu, count, endpoint=False)
    return [("L", float(mesh.a) + h * v) for v in s] + [("R", float(mesh.b) - h * v) for v in s]


@pytest.mark.parametrize("name,d", [("RS", 1), ("RLKV", 1), ("RLKV", 2)])
def test_agreement_on_well_conditioned(name, d):
    ex = EXAMPLES[2]
    mesh = ex.mesh(40)
    u = l2_project(ex.u0, mesh, d)
    ff = filter_field(u, name)
    for side, x in _boundary_points(mesh, d):
        assert abs(numeric_filter_point(filter_catalog(name, d, side), u, x) - ff.evaluate_at(x)) <= 1e-10


def test_legacy_field_matches_symbolic_interior_and_d1():
    mesh = Mesh(0, 1, 20)
    u = l2_project(lambda x: np.sin(2 * np.pi * x), mesh, 1)
    a = LegacyFilteredField(u, "SRV").sample([0.25, 0.75])
    b = filter_field(u, "SRV").sample([0.25, 0.75])
    assert np.max(np.abs(a - b)) < 1e-12
    inner = LegacyFilteredField(u, None).sample([0.5])
    assert np.isnan(inner[0, 0]) and not np.isnan(inner[10, 0])


def test_condition_examples():
    assert condition_number(np.eye(4)) == 1
    sym = filter_catalog("SYMMETRIC", 1)
    assert condition_estimate(sym, Mesh(0, 10, 10), 0.0) < 100


def test_srv_condition_grows_with_degree():
    mesh = Mesh(0, 1, 40)
    conds = [condition_estimate(filter_catalog("SRV", d, "L"), mesh, 0.0, d) for d in (1, 2, 3)]
    assert conds[0] < conds[1] < conds[2]


def test_condition_grows_as_mesh_refines():
    spec = filter_catalog("SRV", 2, "R")
    conds = [condition_estimate(spec, Mesh(0, 1, N), 1.0) for N in (20, 40, 80)]
    assert conds[0] < conds[1] < conds[2]
