"""Experiment driver: config parsing, sweeps over (d, N, filter), filter dumps."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .apply import (FilteredField, convolution_matrix, filter_field, symmetric_halfwidth,
                    window_cells)
from .dg import (EXAMPLES, DGField, Mesh, error_metrics, fit_order, l2_project, sample_thetas,
                 solve_example)
from .errors import ConfigError, UnsupportedDegree
from .exact import rat_str
from .kernels import CATALOG, filter_catalog, kernel_coefficients, shifted_scaled_coefficients
from .legacy import LegacyFilteredField

PIPELINES = ("symbolic", "legacy", "both")
CSV_COLUMNS = ("x", "dg_error", "filtered_error", "pipeline", "filter", "d", "N")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


@dataclass
class ExperimentConfig:
    """One sweep over degrees, meshes and filters for a single example.

    ``t_end`` defaults to the example's final time; 0 filters the plain
    projection of the initial condition.
    """

    example: int
    degrees: list
    meshes: list
    filters: list = field(default_factory=list)
    pipeline: str = "symbolic"
    points_per_cell: int = 20
    output: str = "results"
    t_end: float | None = None
    cfl: float = 0.1

    def __post_init__(self):
        self.filters = [str(f).upper() for f in self.filters]
        self.validate()

    @property
    def pipelines(self) -> tuple:
        return ("symbolic", "legacy") if self.pipeline == "both" else (self.pipeline,)

    def validate(self):
        def bad(name, msg):
            raise ConfigError(f"field '{name}': {msg}")

        if self.example not in EXAMPLES:
            bad("example", f"must be one of {sorted(EXAMPLES)}, got {self.example!r}")
        for name in ("degrees", "meshes"):
            vals = getattr(self, name)
            if not isinstance(vals, list) or not vals:
                bad(name, "must be a non-empty list")
            if any(not isinstance(v, int) or isinstance(v, bool) or v < 1 for v in vals):
                bad(name, f"entries must be positive integers, got {vals!r}")
        if not isinstance(self.points_per_cell, int) or self.points_per_cell < 1:
            bad("points_per_cell", "must be a positive integer")
        if self.pipeline not in PIPELINES:
            bad("pipeline", f"must be one of {PIPELINES}, got {self.pipeline!r}")
        if self.t_end is not None and not (isinstance(self.t_end, (int, float)) and self.t_end >= 0):
            bad("t_end", "must be a non-negative number or null")
        if not isinstance(self.cfl, (int, float)) or self.cfl <= 0:
            bad("cfl", "must be positive")
        for i, name in enumerate(self.filters):
            if name not in CATALOG:
                bad(f"filters[{i}]", f"unknown filter {name!r}; expected one of {CATALOG}")
        for d in self.degrees:
            for N in self.meshes:
                # the symmetric interior kernel must fit, and each one-sided window
                if 2 * symmetric_halfwidth(d) > N:
                    bad("meshes", f"N={N} too coarse for d={d}: interior kernel spans "
                                  f"{2 * symmetric_halfwidth(d)} cells")
                for name in self.filters:
                    if name == "SYMMETRIC":
                        continue
                    need = window_cells(filter_catalog(name, d, "L"))
                    if need > N:
                        bad("meshes", f"N={N} too coarse for {name} with d={d}: needs {need} cells")

    @classmethod
    def from_dict(cls, doc: dict) -> ExperimentConfig:
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError(f"unknown field(s) {unknown}; allowed: {sorted(known)}")
        missing = [k for k in ("example", "degrees", "meshes") if k not in doc]
        if missing:
            raise ConfigError(f"missing required field(s) {missing}")
        return cls(**doc)

    @classmethod
    def load(cls, path) -> ExperimentConfig:
        text = Path(path).read_text()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(doc)


def dump_filter(name: str, d: int, side: str = "L") -> dict:
    """Knots, index set, shift-polynomial coefficients and Q for one catalog filter.

    ``coefficients[j][p]`` is the xi^p coefficient of the j-th kernel weight
    (unit h). Q is taken on the unit-spaced mesh with as many cells as the
    boundary window needs; symmetric filters have none.
    """
    spec = filter_catalog(name, d, side)
    system = kernel_coefficients(spec)
    polys = shifted_scaled_coefficients(spec, 1, system)
    r = spec.reproduction_degree
    doc = {
        "filter": spec.name,
        "d": d,
        "side": spec.side,
        "degree": spec.degree,
        "reproduction_degree": r,
        "knots": [rat_str(t) for t in spec.knots],
        "index_sequence": list(spec.index_sequence),
        "c0": [rat_str(c) for c in system.c0],
        "coefficients": [[rat_str(p.coeffs[i]) if i < len(p.coeffs) else "0" for i in range(r + 1)]
                         for p in polys],
        "Q": None,
    }
    if spec.side != "sym":
        cells = max(window_cells(spec), int(2 * symmetric_halfwidth(d)) + 1)
        cm = convolution_matrix(spec, Mesh(0, cells, cells), d)
        doc["Q"] = cm.Q.to_strings()
        doc["Q_rows"] = list(cm.rows)
        doc["lam"] = rat_str(cm.lam)
    return doc


@dataclass
class CellResult:
    d: int
    N: int
    filter: str | None
    pipeline: str | None
    dg_L2: float
    dg_Linf: float
    filtered_L2: float | None = None
    filtered_Linf: float | None = None
    interior_L2: float | None = None
    interior_Linf: float | None = None
    csv: str = ""


def _dg_solution(cfg: ExperimentConfig, d: int, N: int) -> tuple:
    ex = EXAMPLES[cfg.example]
    t_end = ex.t_end if cfg.t_end is None else float(cfg.t_end)
    if t_end == 0:
        return l2_project(ex.u0, ex.mesh(N), d), ex.exact(0.0)
    return solve_example(cfg.example, d, N, t_end, cfg.cfl), ex.exact(t_end)


def _write_csv(path: Path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        w.writerows(rows)


def _fmt(v: float) -> str:
    return repr(float(v))


def run_cell(cfg: ExperimentConfig, d: int, N: int, name: str | None, out: Path) -> list:
    """All pipelines for one (d, N, filter); returns CellResult records."""
    u, exact = _dg_solution(cfg, d, N)
    P = cfg.points_per_cell
    dg = error_metrics(u, exact, P)
    if name is None:
        path = out / f"dg_d{d}_N{N}.csv"
        _write_csv(path, [(_fmt(x), _fmt(e), "", "none", "none", d, N)
                          for x, e in zip(dg["x"], dg["pointwise"])])
        return [CellResult(d, N, None, None, dg["L2"], dg["Linf"], csv=path.name)]

    boundary = None if name == "SYMMETRIC" else name
    mu = symmetric_halfwidth(d)
    interior = (mu, N - mu)
    records = []
    for pipeline in cfg.pipelines:
        if pipeline == "symbolic":
            ff = filter_field(u, boundary)
        else:
            ff = LegacyFilteredField(u, boundary)
        full = error_metrics(ff, exact, P, region=None if boundary else interior)
        inner = error_metrics(ff, exact, P, region=interior)
        filt = ff.sample(sample_thetas(P))
        ferr = np.abs(filt - exact(_points(u, P))).ravel()
        path = out / f"{name}_{pipeline}_d{d}_N{N}.csv"
        _write_csv(path, [(_fmt(x), _fmt(e), "" if np.isnan(f) else _fmt(f), pipeline, name, d, N)
                          for x, e, f in zip(dg["x"], dg["pointwise"], ferr)])
        if pipeline == "symbolic" and isinstance(ff, FilteredField):
            (out / f"{name}_symbolic_d{d}_N{N}.json").write_text(json.dumps(ff.to_json(), indent=1))
        records.append(CellResult(d, N, name, pipeline, dg["L2"], dg["Linf"], full["L2"], full["Linf"],
                                  inner["L2"], inner["Linf"], path.name))
    return records


def _points(u: DGField, P: int) -> np.ndarray:
    th = np.array([float(t) for t in sample_thetas(P)])
    return u.mesh.local_to_x(np.arange(u.mesh.N)[:, None], th[None, :])


def _orders(records: list, key: str) -> float | None:
    pts = sorted((r.N, getattr(r, key)) for r in records if getattr(r, key) is not None)
    if len(pts) < 2 or any(e <= 0 for _, e in pts):
        return None
    return fit_order([1.0 / n for n, _ in pts], [e for _, e in pts])


def summarize(cfg: ExperimentConfig, results: list) -> dict:
    groups = {}
    for r in results:
        groups.setdefault((r.d, r.filter, r.pipeline), []).append(r)
    orders = []
    for (d, name, pipeline), recs in groups.items():
        orders.append({
            "d": d, "filter": name, "pipeline": pipeline,
            "dg_L2_order": _orders(recs, "dg_L2"),
            "dg_Linf_order": _orders(recs, "dg_Linf"),
            "filtered_L2_order": _orders(recs, "filtered_L2"),
            "filtered_Linf_order": _orders(recs, "filtered_Linf"),
            "interior_L2_order": _orders(recs, "interior_L2"),
        })
    return {"config": asdict(cfg), "errors": [asdict(r) for r in results], "orders": orders}


def _cell_task(args):
    cfg_doc, d, N, name, out = args
    return run_cell(ExperimentConfig.from_dict(cfg_doc), d, N, name, Path(out))


def run(cfg: ExperimentConfig, out: str | Path | None = None, threads: int = 1) -> dict:
    """Run the sweep, writing CSVs, filter dumps and summary.json under ``out``."""
    out = Path(out or cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    names = cfg.filters or [None]
    tasks = [(asdict(cfg), d, N, name, str(out)) for d in cfg.degrees for name in names for N in cfg.meshes]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_cell_task, tasks))
    else:
        chunks = [_cell_task(t) for t in tasks]
    results = [r for chunk in chunks for r in chunk]

    dumps = out / "filters"
    for name in cfg.filters:
        sides = ("sym",) if name == "SYMMETRIC" else ("L", "R")
        for d in cfg.degrees:
            for side in sides:
                dumps.mkdir(exist_ok=True)
                doc = dump_filter(name, d, side)
                (dumps / f"{name}_d{d}_{side}.json").write_text(json.dumps(doc, indent=1))

    summary = summarize(cfg, results)
    (out / "summary.json").write_text(json.dumps(summary, indent=1))
    return summary


def _print_orders(summary: dict):
    for o in summary["orders"]:
        label = f"d={o['d']} filter={o['filter'] or '-'} pipeline={o['pipeline'] or '-'}"
        parts = [f"{k}={v:.2f}" for k, v in o.items() if k.endswith("order") and v is not None]
        print(label, " ".join(parts))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psiac", description=__doc__)
    parser.add_argument("--threads", type=int, default=1, help="worker processes for run")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None, help="output directory (overrides config)")
    p_run.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    p_dump = sub.add_parser("dump-filter", help="print one filter's coefficients as JSON")
    p_dump.add_argument("--name", required=True)
    p_dump.add_argument("--degree", type=int, required=True)
    p_dump.add_argument("--side", choices=("L", "R", "sym"), default="L")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = ExperimentConfig.load(args.config)
            summary = run(cfg, args.out, threads=max(1, args.threads))
            _print_orders(summary)
        else:
            if args.name.upper() not in CATALOG:
                raise ConfigError(f"unknown filter {args.name!r}; expected one of {CATALOG}")
            side = args.side
            if args.name.upper() == "SYMMETRIC":
                side = "sym"
            elif side == "sym":
                raise ConfigError(f"{args.name} is one-sided; use --side L or R")
            print(json.dumps(dump_filter(args.name, args.degree, side), indent=1))
    except (ConfigError, UnsupportedDegree, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK
