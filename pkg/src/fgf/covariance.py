"""Covariance catalog for separable centered Gaussian fields on [0,1]^n.

Built-in kinds: the Brownian sheet, the anisotropic fractional Brownian
sheet (one Hurst index per axis), the constant field (a single shared
Gaussian amplitude), the zero field, and tabulated matrices attached to a
grid. Positive semidefiniteness of tabulated input is not checked here;
it is validated spectrally when the matrix is decomposed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import Grid, same_grid

#: Largest node count a dense Gram matrix may be materialized for.
DEFAULT_MAX_POINTS = 4096

KINDS = (
    "brownian_sheet",
    "fractional_brownian_sheet",
    "constant_field",
    "zero_field",
    "tabulated",
)


class NonFiniteCovarianceError(ArithmeticError):
    """A covariance evaluation produced a non-finite value."""

    def __init__(self, message: str, node=None):
        super().__init__(message)
        self.node = node


class SizeBudgetError(RuntimeError):
    """The requested grid exceeds the dense-matrix size budget."""


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    """Evaluatable covariance function R(t, s) of one catalog kind."""

    kind: str
    n: int
    hurst: Optional[tuple[float, ...]] = None
    variance: Optional[float] = None
    matrix: Optional[np.ndarray] = None
    grid: Optional[Grid] = None

    def spec(self) -> dict:
        """JSON-serializable description, used in artifact file headers."""
        out: dict = {"kind": self.kind, "n": self.n}
        if self.hurst is not None:
            out["hurst"] = list(self.hurst)
        if self.variance is not None:
            out["variance"] = self.variance
        if self.kind == "tabulated":
            out["N"] = self.grid.N
        return out


def brownian_sheet(n: int = 1) -> CovarianceModel:
    """Brownian sheet: R(t, s) = prod_k min(t_k, s_k)."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return CovarianceModel(kind="brownian_sheet", n=n)


def fractional_brownian_sheet(hurst) -> CovarianceModel:
    """Fractional Brownian sheet with one Hurst index per axis.

    Per-axis covariance is (t^{2H} + s^{2H} - |t-s|^{2H}) / 2; the full
    covariance is the product over axes. H = 1/2 on every axis recovers
    the Brownian sheet entrywise.
    """
    hurst = tuple(float(h) for h in np.atleast_1d(hurst))
    if not hurst:
        raise ValueError("need at least one Hurst index")
    for h in hurst:
        if not 0.0 < h < 1.0:
            raise ValueError(f"Hurst index must lie in (0, 1), got {h}")
    return CovarianceModel(kind="fractional_brownian_sheet", n=len(hurst), hurst=hurst)


def constant_field(variance: float = 1.0, n: int = 1) -> CovarianceModel:
    """Field identically equal to one shared Gaussian amplitude of the given variance."""
    variance = float(variance)
    if variance < 0.0:
        raise ValueError(f"variance must be >= 0, got {variance}")
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return CovarianceModel(kind="constant_field", n=n, variance=variance)


def zero_field(n: int = 1) -> CovarianceModel:
    """The trivial field X = 0."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return CovarianceModel(kind="zero_field", n=n)


def tabulated(matrix: np.ndarray, grid: Grid) -> CovarianceModel:
    """Covariance given by a dense matrix on a grid.

    The matrix is symmetrized on ingestion; off-node evaluations snap to
    the midpoint cell containing the query point.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (grid.size, grid.size):
        raise ValueError(
            f"matrix shape {matrix.shape} does not match grid with {grid.size} nodes"
        )
    matrix = (matrix + matrix.T) / 2
    matrix.setflags(write=False)
    return CovarianceModel(kind="tabulated", n=grid.n, matrix=matrix, grid=grid)


def _fbm_axis(t, s, h: float):
    # exact min() at h = 1/2 so the reduction to the Brownian sheet is bitwise
    if h == 0.5:
        return np.minimum(t, s)
    e = 2.0 * h
    return 0.5 * (t**e + s**e - np.abs(t - s) ** e)


def _cell_indices(grid: Grid, points: np.ndarray) -> np.ndarray:
    """Flat indices of the midpoint cells containing the given points."""
    per_axis = np.clip((points * grid.N).astype(int), 0, grid.N - 1)
    return np.ravel_multi_index(tuple(per_axis.T), grid.shape)


def evaluate(model: CovarianceModel, t, s) -> float:
    """Evaluate R(t, s) at two points of [0,1]^n."""
    t = np.asarray(t, dtype=float).reshape(-1)
    s = np.asarray(s, dtype=float).reshape(-1)
    if t.shape != (model.n,) or s.shape != (model.n,):
        raise ValueError(
            f"points must have dimension {model.n}, got {t.size} and {s.size}"
        )
    if model.kind == "brownian_sheet":
        return float(np.prod(np.minimum(t, s)))
    if model.kind == "fractional_brownian_sheet":
        out = 1.0
        for k, h in enumerate(model.hurst):
            out *= _fbm_axis(t[k], s[k], h)
        return float(out)
    if model.kind == "constant_field":
        return float(model.variance)
    if model.kind == "zero_field":
        return 0.0
    i, j = _cell_indices(model.grid, np.stack([t, s]))
    return float(model.matrix[i, j])


def variance_diagonal(model: CovarianceModel, grid: Grid) -> np.ndarray:
    """The variance function R(t_i, t_i) sampled at every grid node."""
    if model.n != grid.n:
        raise ValueError(f"model has dimension {model.n}, grid has {grid.n}")
    if model.kind == "brownian_sheet":
        return np.prod(grid.nodes, axis=1)
    if model.kind == "fractional_brownian_sheet":
        out = np.ones(grid.size)
        for k, h in enumerate(model.hurst):
            x = grid.nodes[:, k]
            out *= _fbm_axis(x, x, h)
        return out
    if model.kind == "constant_field":
        return np.full(grid.size, model.variance)
    if model.kind == "zero_field":
        return np.zeros(grid.size)
    idx = _cell_indices(model.grid, grid.nodes)
    return model.matrix[idx, idx]


@dataclass(frozen=True)
class TraceResult:
    """Quadrature value of the integrated variance plus its admissibility flag."""

    value: float
    admissible: bool


def trace(model: CovarianceModel, grid: Grid) -> TraceResult:
    """Quadrature approximation of the integrated variance over the cube.

    A finite value is the admissibility criterion for the square-root
    kernel representation to exist.
    """
    diag = variance_diagonal(model, grid)
    bad = np.flatnonzero(~np.isfinite(diag))
    if bad.size:
        i = int(bad[0])
        raise NonFiniteCovarianceError(
            f"R(t, t) is not finite at node {i} = {tuple(grid.nodes[i])}",
            node=tuple(grid.nodes[i]),
        )
    value = float(np.sum(grid.weights * diag))
    return TraceResult(value=value, admissible=bool(np.isfinite(value)))


def gram(model: CovarianceModel, grid: Grid, max_points: int = DEFAULT_MAX_POINTS) -> np.ndarray:
    """Dense covariance matrix G[i, j] = R(t_i, t_j) in canonical flat order.

    Symmetrized as (G + G.T)/2 to absorb floating-point asymmetry.
    """
    if grid.size > max_points:
        raise SizeBudgetError(
            f"grid has {grid.size} nodes, above the dense-matrix budget of {max_points}"
        )
    if model.n != grid.n:
        raise ValueError(f"model has dimension {model.n}, grid has {grid.n}")
    T = grid.nodes
    if model.kind == "brownian_sheet":
        G = np.ones((grid.size, grid.size))
        for k in range(grid.n):
            G *= np.minimum.outer(T[:, k], T[:, k])
    elif model.kind == "fractional_brownian_sheet":
        G = np.ones((grid.size, grid.size))
        for k, h in enumerate(model.hurst):
            x = T[:, k]
            G *= _fbm_axis(x[:, None], x[None, :], h)
    elif model.kind == "constant_field":
        G = np.full((grid.size, grid.size), model.variance)
    elif model.kind == "zero_field":
        G = np.zeros((grid.size, grid.size))
    else:
        if same_grid(model.grid, grid):
            G = np.array(model.matrix)
        else:
            idx = _cell_indices(model.grid, grid.nodes)
            G = model.matrix[np.ix_(idx, idx)]
    return (G + G.T) / 2
