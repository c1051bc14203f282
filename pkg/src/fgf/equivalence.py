"""Volterra perturbations of the square-root kernel and equivalent fields.

A field equivalent in law to X arises by feeding the original kernel with
a perturbed noise: the perturbation is a Volterra kernel L (supported on
u <= s componentwise), the noise transform subtracts the L-smoothed running
integral from each cell increment, and on the kernel level

    K~[i, j] = K[i, j] - sum_m w_m K[i, m] L[m, j]

where the Volterra support of L confines the sum to cells u_m >= s_j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mercer
from .grid import Grid, same_grid


def _support_mask(grid: Grid) -> np.ndarray:
    # mask[i, j] is True iff u_j <= s_i componentwise
    T = grid.nodes
    mask = np.ones((grid.size, grid.size), dtype=bool)
    for k in range(grid.n):
        mask &= T[None, :, k] <= T[:, None, k]
    return mask


@dataclass(frozen=True, eq=False)
class VolterraKernel:
    """Square-integrable kernel vanishing off the region u <= s componentwise."""

    grid: Grid
    L: np.ndarray  # (P, P), rows indexed by s, columns by u
    zeroed_mass: float = 0.0

    def __post_init__(self):
        if self.L.shape != (self.grid.size, self.grid.size):
            raise ValueError(
                f"kernel shape {self.L.shape} does not match grid with {self.grid.size} nodes"
            )
        if not np.all(np.isfinite(self.L)):
            raise ValueError("Volterra kernel has non-finite entries")
        if np.any(self.L[~_support_mask(self.grid)] != 0.0):
            raise ValueError("kernel has support outside the Volterra region u <= s")


def volterra_project(raw: np.ndarray, grid: Grid) -> VolterraKernel:
    """Zero all entries outside the Volterra support region u <= s.

    ``zeroed_mass`` reports the weighted L2 norm of the removed part.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.shape != (grid.size, grid.size):
        raise ValueError(
            f"matrix shape {raw.shape} does not match grid with {grid.size} nodes"
        )
    mask = _support_mask(grid)
    removed = np.where(mask, 0.0, raw)
    w = grid.weights
    zeroed = float(np.sqrt(np.sum(np.outer(w, w) * removed**2)))
    L = np.where(mask, raw, 0.0)
    L.setflags(write=False)
    return VolterraKernel(grid=grid, L=L, zeroed_mass=zeroed)


def transform_kernel(kernel: mercer.FredholmKernel, volterra: VolterraKernel) -> np.ndarray:
    """Perturbed kernel K~ = K - K (w L); zero perturbation returns K bitwise."""
    if not same_grid(kernel.grid, volterra.grid):
        raise ValueError("kernel and Volterra perturbation live on different grids")
    w = kernel.grid.weights
    return kernel.K - (kernel.K * w) @ volterra.L


def transform_noise(
    volterra: VolterraKernel, increments: np.ndarray, grid: Grid
) -> np.ndarray:
    """Apply the noise-level transform to per-cell white-noise increments.

    Cell j of each realization receives
    increment(j) - w_j * sum_{u_m <= s_j} L[j, m] increment(m); cumulative
    sums of the result over [0, t] give the transformed sheet at the nodes.
    """
    if not same_grid(volterra.grid, grid):
        raise ValueError("Volterra perturbation lives on a different grid")
    increments = np.atleast_2d(np.asarray(increments, dtype=float))
    if increments.shape[1] != grid.size:
        raise ValueError(
            f"increment rows have {increments.shape[1]} cells, grid has {grid.size}"
        )
    return increments - (increments @ volterra.L.T) * grid.weights


def equivalent_covariance(transformed_kernel: np.ndarray, grid: Grid) -> np.ndarray:
    """Covariance of the field represented by a (possibly perturbed) kernel."""
    transformed_kernel = np.asarray(transformed_kernel, dtype=float)
    if transformed_kernel.shape != (grid.size, grid.size):
        raise ValueError(
            f"kernel shape {transformed_kernel.shape} does not match grid "
            f"with {grid.size} nodes"
        )
    return mercer.weighted_square(transformed_kernel, grid.weights)


def cumulative_sheet(increments: np.ndarray, grid: Grid) -> np.ndarray:
    """Sheet values at the nodes: sum of cell increments over the rectangle [0, t]."""
    increments = np.atleast_2d(np.asarray(increments, dtype=float))
    out = increments.reshape(increments.shape[0], *grid.shape)
    for axis in range(1, grid.n + 1):
        out = np.cumsum(out, axis=axis)
    return out.reshape(increments.shape[0], grid.size)


def constant_perturbation(grid: Grid, scale: float) -> VolterraKernel:
    """Constant value on the whole Volterra support region."""
    return volterra_project(np.full((grid.size, grid.size), float(scale)), grid)


def gaussian_bump_perturbation(grid: Grid, scale: float, width: float = 0.25) -> VolterraKernel:
    """Gaussian bump in |s - u|, restricted to the Volterra support region."""
    if width <= 0:
        raise ValueError(f"width must be positive, got {width}")
    diff = grid.nodes[:, None, :] - grid.nodes[None, :, :]
    d2 = np.sum(diff**2, axis=-1)
    return volterra_project(float(scale) * np.exp(-d2 / (2.0 * width**2)), grid)
