"""Run every config in configs/ (or the ones given) into results/<config name>."""

import sys
from pathlib import Path

from psiac.cli import ExperimentConfig, run

root = Path(__file__).resolve().parent.parent
paths = [Path(p) for p in sys.argv[1:]] or sorted((root / "configs").glob("*.json"))
for path in paths:
    cfg = ExperimentConfig.load(path)
    out = root / "results" / path.stem
    summary = run(cfg, out, threads=4)
    print(f"{path.name} -> {out}")
    for o in summary["orders"]:
        orders = {k: round(v, 2) for k, v in o.items() if k.endswith("order") and v is not None}
        print(f"  d={o['d']} {o['filter']} {o['pipeline']}: {orders}")
