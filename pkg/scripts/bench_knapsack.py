#!/usr/bin/env python3
"""Runtime trend of the bounded DP on equality knapsacks as the largest
weight doubles (n fixed).  Prints median seconds per weight bound and the
ratio between consecutive bounds."""

import argparse

from deltailp.cli import bench_knapsack_delta


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--deltas", type=int, nargs=2, default=(50, 100))
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    res = bench_knapsack_delta(
        n=args.n, deltas=tuple(args.deltas), repeats=args.repeats, seed=args.seed
    )
    for d in sorted(res["median_seconds"]):
        print(f"delta={d}: median {res['median_seconds'][d]:.4f} s")
    print(f"ratio: {res['ratio']:.3f}")


if __name__ == "__main__":
    main()
