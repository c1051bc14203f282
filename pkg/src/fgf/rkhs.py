"""Membership tests and inner products in the Cameron-Martin space.

A discretized function f belongs to the (discrete) reproducing-kernel space
of a square-root kernel K when f = K (w a) for some coefficient vector a;
the squared norm of the minimal-norm preimage is the weighted L2 norm of a.
Membership is decided by a spectral pseudo-inversion of K: components of f
along retained modes are divided by the singular values, components along
discarded modes contribute to the residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, same_grid
from .mercer import FredholmKernel, weighted_eigh

DEFAULT_MEMBERSHIP_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class RkhsElement:
    """Result of projecting a function onto the range of a square-root kernel."""

    kernel: FredholmKernel
    values: np.ndarray       # the target function at the nodes
    preimage: np.ndarray     # minimal-norm a with K (w a) ~= values
    residual: float          # weighted L2 norm of values - K (w a)
    relative_residual: float
    accepted: bool

    @property
    def grid(self) -> Grid:
        return self.kernel.grid


def project_membership(
    kernel: FredholmKernel,
    values: np.ndarray,
    tol: float = DEFAULT_MEMBERSHIP_TOL,
) -> RkhsElement:
    """Minimal-norm preimage of ``values`` under f -> K (w f), with residual."""
    grid = kernel.grid
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.shape != (grid.size,):
        raise ValueError(
            f"function has {values.shape[0]} values, grid has {grid.size} nodes"
        )
    if not np.all(np.isfinite(values)):
        raise ValueError("function has non-finite values")

    w = grid.weights
    # K is symmetric, so its weighted eigendecomposition doubles as an SVD of
    # the map a -> K (w a); modes below tol * s_max are treated as null space.
    svals, funcs = weighted_eigh(kernel.K, w)
    order = np.argsort(-np.abs(svals), kind="stable")
    svals = svals[order]
    funcs = funcs[:, order]

    smax = np.abs(svals[0]) if svals.size else 0.0
    keep = np.abs(svals) > tol * smax
    coeffs = funcs.T @ (w * values)

    a = funcs[:, keep] @ (coeffs[keep] / svals[keep])
    fitted = kernel.K @ (w * a)
    diff = values - fitted
    residual = float(np.sqrt(np.sum(w * diff**2)))
    norm = float(np.sqrt(np.sum(w * values**2)))
    relative = 0.0 if residual == 0.0 else (residual / norm if norm > 0 else np.inf)
    accepted = relative <= tol if norm > 0 else residual <= tol

    a = a.copy()
    a.setflags(write=False)
    values = values.copy()
    values.setflags(write=False)
    return RkhsElement(
        kernel=kernel,
        values=values,
        preimage=a,
        residual=residual,
        relative_residual=float(relative),
        accepted=accepted,
    )


def rkhs_inner(f: RkhsElement, g: RkhsElement) -> float:
    """Inner product of two members: weighted L2 product of minimal preimages."""
    if not (f.accepted and g.accepted):
        raise ValueError("inner product requires both functions to be members")
    if not same_grid(f.grid, g.grid):
        raise ValueError("functions live on different grids")
    if f.kernel is not g.kernel and not np.array_equal(f.kernel.K, g.kernel.K):
        raise ValueError("functions were projected against different kernels")
    return float(np.sum(f.grid.weights * f.preimage * g.preimage))


def rkhs_norm(f: RkhsElement) -> float:
    """Norm of a member; the square is clipped at zero before the root."""
    return float(np.sqrt(max(rkhs_inner(f, f), 0.0)))
