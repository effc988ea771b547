"""Convergence table for DG output and filtered output on one example.

Prints L2 errors per mesh and the fitted orders for the plain DG solution,
the symmetric filter in the interior, and a boundary family on the whole domain.
"""

import argparse

from psiac.apply import filter_field, symmetric_halfwidth
from psiac.dg import EXAMPLES, error_metrics, fit_order, solve_example


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--example", type=int, default=2, choices=sorted(EXAMPLES))
    ap.add_argument("--filter", default="SRV")
    ap.add_argument("--degrees", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--meshes", type=int, nargs="+", default=[20, 40, 80])
    args = ap.parse_args()

    ex = EXAMPLES[args.example]
    exact = ex.exact(ex.t_end)
    hs = [1 / N for N in args.meshes]
    for d in args.degrees:
        mu = symmetric_halfwidth(d)
        rows = {"dg": [], "interior": [], args.filter: []}
        for N in args.meshes:
            u = solve_example(args.example, d, N)
            ff = filter_field(u, args.filter)
            rows["dg"].append(error_metrics(u, exact)["L2"])
            rows["interior"].append(error_metrics(ff, exact, region=(mu, N - mu))["L2"])
            rows[args.filter].append(error_metrics(ff, exact)["L2"])
        print(f"d={d}")
        for label, errs in rows.items():
            cells = " ".join(f"{e:10.3e}" for e in errs)
            print(f"  {label:>10} {cells}   order {fit_order(hs, errs):5.2f}")


if __name__ == "__main__":
    main()
