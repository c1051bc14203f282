#!/usr/bin/env python3
"""Deterministic L2 truncation error of the series expansion, per basis.

For each orthonormal basis the curve starts at the integrated variance
(trace) and decreases toward the clipping residue as modes accumulate;
the decay rate depends on how well the basis aligns with the covariance
eigenfunctions.
"""

import argparse
import sys

import numpy as np

from fgf import (
    BASIS_KINDS,
    brownian_sheet,
    build_grid,
    decompose,
    fractional_brownian_sheet,
    make_basis,
    square_root_kernel,
    truncation_errors,
    variance_diagonal,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--N", type=int, default=32, help="per-axis resolution (power of two)")
    ap.add_argument("--hurst", type=float, help="use a fractional sheet with this index")
    ap.add_argument("--csv", help="write the curves to this CSV path")
    args = ap.parse_args()

    model = (fractional_brownian_sheet([args.hurst] * args.n)
             if args.hurst is not None else brownian_sheet(args.n))
    grid = build_grid(args.n, args.N)
    kernel = square_root_kernel(decompose(model, grid))
    diag = variance_diagonal(model, grid)

    curves = {kind: truncation_errors(kernel, make_basis(kind, grid), diag)
              for kind in BASIS_KINDS}

    marks = sorted({0, 1, 2, 4, 8, grid.size // 4, grid.size // 2, grid.size})
    header = f"{'K':>6}" + "".join(f" {kind:>18}" for kind in BASIS_KINDS)
    print(f"model={model.kind} n={args.n} N={args.N}")
    print(header)
    for K in marks:
        row = "".join(f" {curves[kind][K]:>18.12e}" for kind in BASIS_KINDS)
        print(f"{K:>6}{row}")

    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as f:
            f.write("K," + ",".join(BASIS_KINDS) + "\n")
            for K in range(grid.size + 1):
                vals = ",".join(repr(float(curves[kind][K])) for kind in BASIS_KINDS)
                f.write(f"{K},{vals}\n")
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
