"""Phase-transition map over (n_i, n_o) for unstructured outliers.

Writes a ResultTable CSV plus one SVG heatmap per method.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from ncpursuit.experiments import ExperimentConfig, run_experiment
from ncpursuit.heatmap import render_heatmap


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results/phase")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    cfg = ExperimentConfig(kind="phase", grid={"n_i": [8, 16, 24, 32, 40], "n_o": [100, 500, 1000, 2000]},
                           fixed={"M1": 50, "r": 4}, methods=("ANCP", "SNCP"),
                           trials=args.trials, master_seed=args.seed)
    table = run_experiment(cfg, workers=args.workers)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table.write_csv(out / "phase.csv")
    for method in cfg.methods:
        render_heatmap(table, "n_i", "n_o", out / f"phase_{method.lower()}.svg", method=method)
    print(table.to_csv(), end="")


if __name__ == "__main__":
    main()
