"""Tensor midpoint grids on the unit cube [0,1]^n with quadrature weights."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Grid:
    """Midpoint tensor grid: N^n nodes in row-major order, last axis fastest.

    Every node carries the cell volume N^(-n) as quadrature weight, so a
    weighted sum over nodes approximates the integral over [0,1]^n.
    """

    n: int
    N: int
    nodes: np.ndarray    # (N^n, n), each row a point strictly inside [0,1]^n
    weights: np.ndarray  # (N^n,), all equal to N^(-n)

    @property
    def size(self) -> int:
        return self.N**self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n


def build_grid(n: int, N: int) -> Grid:
    """Build the midpoint grid with ``n`` axes and ``N`` points per axis.

    Per-axis nodes are (i + 1/2)/N for i = 0..N-1.
    """
    if n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n}")
    if N < 1:
        raise ValueError(f"points per axis must be a positive integer, got {N}")
    axis = (np.arange(N) + 0.5) / N
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    nodes = np.stack(mesh, axis=-1).reshape(-1, n)
    weights = np.full(N**n, float(N) ** (-n))
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return Grid(n=n, N=N, nodes=nodes, weights=weights)


def flat_index(grid: Grid, multi) -> int:
    """Row-major flat index of a multi-index (last axis varies fastest)."""
    multi = tuple(int(c) for c in np.atleast_1d(multi))
    if len(multi) != grid.n:
        raise IndexError(f"multi-index has {len(multi)} components, grid has {grid.n} axes")
    for c in multi:
        if not 0 <= c < grid.N:
            raise IndexError(f"multi-index component {c} outside 0..{grid.N - 1}")
    return int(np.ravel_multi_index(multi, grid.shape))


def multi_index(grid: Grid, flat: int) -> tuple[int, ...]:
    """Inverse of :func:`flat_index`."""
    flat = int(flat)
    if not 0 <= flat < grid.size:
        raise IndexError(f"flat index {flat} outside 0..{grid.size - 1}")
    return tuple(int(c) for c in np.unravel_index(flat, grid.shape))


def same_grid(a: Grid, b: Grid) -> bool:
    """True when both grids discretize the same cube the same way."""
    return a.n == b.n and a.N == b.N
