"""Wall time of ANCP, SNCP and CoP scoring as the number of columns grows."""
from __future__ import annotations

import argparse
import time

import numpy as np

from ncpursuit.scoring import compute_scores, normalize_columns


def best_of(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m1", type=int, default=200)
    ap.add_argument("--sizes", default="500,1000,2000,5000,10000")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print("M2,ancp_s,sncp_s,cop_s")
    for M2 in (int(s) for s in args.sizes.split(",")):
        D = normalize_columns(rng.standard_normal((args.m1, M2)))
        times = [best_of(lambda m=m: compute_scores(D, m, normalized=True), args.repeats)
                 for m in ("ANCP", "SNCP", "CoP")]
        print(f"{M2}," + ",".join(f"{t:.4f}" for t in times))


if __name__ == "__main__":
    main()
