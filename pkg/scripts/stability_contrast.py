"""Boundary-region errors of the symbolic and per-point legacy filters side by side.

Filters the L2 projection of Example 1 (t = 0) and prints, for each degree and
mesh, the max boundary error of both paths and the legacy matrix condition.
"""

import argparse

import numpy as np

from psiac.apply import filter_field, symmetric_halfwidth
from psiac.dg import EXAMPLES, l2_project, sample_thetas
from psiac.kernels import filter_catalog
from psiac.legacy import condition_estimate, numeric_filter_point


def boundary_points(N, d, per_cell):
    mu = float(symmetric_halfwidth(d))
    s = (np.arange(N)[:, None] + np.array([float(t) for t in sample_thetas(per_cell)])[None, :]).ravel()
    left = s[s < mu] / N
    return [("L", x) for x in left] + [("R", 1.0 - x) for x in left]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--filter", default="SRV")
    ap.add_argument("--degrees", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--meshes", type=int, nargs="+", default=[20, 40, 80])
    ap.add_argument("--points-per-cell", type=int, default=20)
    args = ap.parse_args()

    ex = EXAMPLES[1]
    print(f"{'d':>2} {'N':>4} {'symbolic':>10} {'legacy':>10} {'ratio':>8} {'cond(x=a)':>10}")
    for d in args.degrees:
        for N in args.meshes:
            u = l2_project(ex.u0, ex.mesh(N), d)
            ff = filter_field(u, args.filter)
            pts = boundary_points(N, d, args.points_per_cell)
            truth = ex.u0(np.array([x for _, x in pts]))
            sym = np.array([ff.evaluate_at(x) for _, x in pts])
            leg = np.array([numeric_filter_point(filter_catalog(args.filter, d, s), u, x) for s, x in pts])
            es, el = np.abs(sym - truth).max(), np.abs(leg - truth).max()
            cond = condition_estimate(filter_catalog(args.filter, d, "L"), u.mesh, 0.0, d)
            print(f"{d:>2} {N:>4} {es:10.2e} {el:10.2e} {el / es:8.1f} {cond:10.1e}")


if __name__ == "__main__":
    main()
