#!/usr/bin/env python3
"""Nystrom convergence study for the leading Brownian-sheet eigenvalue.

Sweeps the per-axis resolution, measures the empirical convergence order
from eigenvalue differences, and Richardson-extrapolates the continuum
limit (known in closed form for n = 1: 4/pi^2). The extrapolated limit at
N = 1024/2048 is the frozen regression constant used by the test suite.
"""

import argparse
import sys

import numpy as np

from fgf import brownian_sheet, build_grid, decompose


def leading_eigenvalue(N: int) -> float:
    return float(decompose(brownian_sheet(1), build_grid(1, N)).eigenvalues[0])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--resolutions", default="64,128,256,512,1024,2048",
                    help="comma-separated per-axis N values (powers of two)")
    ap.add_argument("--csv", help="write the sweep to this CSV path")
    args = ap.parse_args()

    Ns = [int(v) for v in args.resolutions.split(",")]
    lams = [leading_eigenvalue(N) for N in Ns]

    print(f"{'N':>6} {'lambda1':>20} {'order':>8} {'richardson':>20}")
    rows = []
    for i, (N, lam) in enumerate(zip(Ns, lams)):
        order = rich = float("nan")
        if i >= 2:
            # order p from three successive dyadic values
            order = np.log2((lams[i - 2] - lams[i - 1]) / (lams[i - 1] - lam))
        if i >= 1:
            p = order if np.isfinite(order) else 2.0
            rich = lam + (lam - lams[i - 1]) / (2**p - 1)
        print(f"{N:>6} {lam:>20.15f} {order:>8.4f} {rich:>20.15f}")
        rows.append((N, lam, order, rich))

    exact = 4.0 / np.pi**2
    print(f"\nclosed form 4/pi^2 = {exact:.15f}")
    print(f"final extrapolation gap: {abs(rows[-1][3] - exact):.3e}")

    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as f:
            f.write("N,lambda1,order,richardson\n")
            for row in rows:
                f.write(",".join(repr(float(v)) for v in row) + "\n")
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
