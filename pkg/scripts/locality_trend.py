#!/usr/bin/env python3
"""Empirical locality frequency over growing right-hand-side radii.

For a fixed full-column-rank matrix, draws right-hand sides uniformly from
[-t, t]^rows per radius t, and reports how often every feasible base of the
feasible draws satisfies the corner-locality slack condition."""

import argparse

from deltailp.intlinalg import IntMat
from deltailp.specials import locality_sampler, locality_table

DEFAULT_ROWS = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 1],
    [1, 2, 3],
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=int, nargs="+", default=[10, 100, 1000])
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    a = IntMat.from_rows(DEFAULT_ROWS)
    rows = locality_sampler(a, args.t, samples=args.samples, seed=args.seed)
    print(locality_table(rows))


if __name__ == "__main__":
    main()
