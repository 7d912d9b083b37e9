"""Residual-separation success rate against SNR for outliers in a subspace.

Runs the sweep twice: with the default rank rule (singular values above s1/20)
and with a stricter cut, to show how many noise directions the rank rule keeps.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from ncpursuit.experiments import ExperimentConfig, run_experiment


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results/noise")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--model", default="outlier-subspace",
                    help="outlier-subspace, or clustered-inliers (adds --gamma)")
    ap.add_argument("--gamma", type=float, default=0.2)
    args = ap.parse_args()

    fixed = {"M1": 200, "r": 5, "r_o": 10, "n_i": 100, "n_o": 100, "model": args.model}
    if args.model == "clustered-inliers":
        fixed["gamma"] = args.gamma
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for label, ratio in (("default", None), ("ratio0.2", 0.2)):
        cfg = ExperimentConfig(kind="noise-sweep", grid={"snr": [0.25, 1, 4, 16, 100]}, fixed=fixed,
                               methods=("ANCP", "SNCP"), trials=args.trials, master_seed=args.seed,
                               rank_ratio=ratio)
        table = run_experiment(cfg)
        table.write_csv(out / f"noise_{args.model}_{label}.csv")
        print(f"# rank rule: {label}")
        print(table.to_csv(), end="")


if __name__ == "__main__":
    main()
