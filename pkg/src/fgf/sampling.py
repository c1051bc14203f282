"""Field realizations via series expansion and the direct spectral factor.

The series sampler draws X = sum_{k <= K} c_k * xi_k where the coefficient
functions c_k(t_i) = sum_j w_j basis[j, k] K[i, j] smooth an orthonormal
basis through the square-root kernel, and the xi_k are independent standard
normals. The factor sampler multiplies the spectral factor of the Gram
matrix directly and serves as the ground-truth generator the series
sampler is validated against.

Random streams are counter-based and fully reproducible: realization m of
generator g with seed s draws from Philox keyed by SeedSequence((s, tag(g), m)),
so realizations are independent and their identity does not depend on how
many are requested or in which order they are generated.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Optional

import numpy as np

from . import covariance as cov
from . import mercer
from .grid import Grid, same_grid

BASIS_KINDS = ("discrete_delta", "haar", "trigonometric")

_GENERATOR_TAGS = {"series": 0, "factor": 1, "white_noise": 2}


@dataclass(frozen=True, eq=False)
class Basis:
    """Weighted-orthonormal basis functions sampled at the grid nodes."""

    kind: str
    grid: Grid
    values: np.ndarray  # (P, count)

    @property
    def count(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SampleMeta:
    """Provenance of a batch of realizations."""

    generator: str
    basis: Optional[str]
    truncation: int
    seed: int


@dataclass(frozen=True, eq=False)
class FieldSamples:
    """M realizations of the field on the grid, one per row."""

    grid: Grid
    data: np.ndarray  # (M, P)
    meta: SampleMeta


def _delta_1d(N: int) -> np.ndarray:
    # indicator of one grid cell, scaled to unit weighted norm: sqrt(1/w) = sqrt(N)
    return np.eye(N) * np.sqrt(N)


def _trig_1d(N: int) -> np.ndarray:
    # constant plus sqrt(2) cos(m pi t); exactly orthonormal on midpoints (DCT-II)
    x = (np.arange(N) + 0.5) / N
    out = np.empty((N, N))
    out[:, 0] = 1.0
    if N > 1:
        m = np.arange(1, N)
        out[:, 1:] = np.sqrt(2.0) * np.cos(np.pi * np.outer(x, m))
    return out


def _haar_1d(N: int) -> np.ndarray:
    levels = int(np.log2(N))
    cols = [np.ones(N)]
    for j in range(levels):
        block = N // 2**j
        half = block // 2
        for k in range(2**j):
            f = np.zeros(N)
            f[k * block : k * block + half] = 2.0 ** (j / 2)
            f[k * block + half : (k + 1) * block] = -(2.0 ** (j / 2))
            cols.append(f)
    return np.column_stack(cols)


def make_basis(kind: str, grid: Grid, count: Optional[int] = None) -> Basis:
    """Build the first ``count`` tensor basis functions in canonical order.

    All three kinds are complete on the grid (N^n functions); the constant
    function comes first for haar and trigonometric. Haar requires N to be
    a power of two.
    """
    if kind not in BASIS_KINDS:
        raise ValueError(f"unknown basis kind {kind!r}, expected one of {BASIS_KINDS}")
    count = grid.size if count is None else int(count)
    if not 1 <= count <= grid.size:
        raise ValueError(f"count {count} outside 1..{grid.size} for a complete basis")
    if kind == "discrete_delta":
        full = np.eye(grid.size) * np.sqrt(float(grid.size))
    else:
        if kind == "haar":
            if grid.N & (grid.N - 1) != 0:
                raise ValueError(f"haar basis needs a power-of-two N, got {grid.N}")
            axis = _haar_1d(grid.N)
        else:
            axis = _trig_1d(grid.N)
        full = reduce(np.kron, [axis] * grid.n)
    values = np.array(full[:, :count])
    values.setflags(write=False)
    return Basis(kind=kind, grid=grid, values=values)


def coefficient_matrix(kernel: mercer.FredholmKernel, basis: Basis) -> np.ndarray:
    """All series coefficients: column k holds c_k(t_i) = sum_j w_j basis[j,k] K[i,j]."""
    if not same_grid(kernel.grid, basis.grid):
        raise ValueError("kernel and basis live on different grids")
    return kernel.K @ (basis.grid.weights[:, None] * basis.values)


def coefficient_field(kernel: mercer.FredholmKernel, basis: Basis, k: int) -> np.ndarray:
    """The single coefficient function c_k over the grid nodes."""
    if not same_grid(kernel.grid, basis.grid):
        raise ValueError("kernel and basis live on different grids")
    k = int(k)
    if not 0 <= k < basis.count:
        raise IndexError(f"basis index {k} outside 0..{basis.count - 1}")
    return kernel.K @ (basis.grid.weights * basis.values[:, k])


def realization_rng(seed: int, generator: str, index: int) -> np.random.Generator:
    """Counter-based substream for one realization of one generator kind."""
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed}")
    tag = _GENERATOR_TAGS[generator]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, tag, int(index)))))


def _normal_block(count: int, draws: int, seed: int, generator: str) -> np.ndarray:
    out = np.empty((count, draws))
    for m in range(count):
        out[m] = realization_rng(seed, generator, m).standard_normal(draws)
    return out


def sample_series(
    kernel: mercer.FredholmKernel,
    basis: Basis,
    truncation: Optional[int] = None,
    count: int = 1,
    seed: int = 0,
) -> FieldSamples:
    """Draw realizations from the truncated series expansion.

    Each realization is sum_{k < truncation} c_k * xi_k with independent
    standard normal xi_k from the per-realization substream. Identical
    arguments reproduce identical samples bitwise.
    """
    trunc = basis.count if truncation is None else int(truncation)
    if not 0 <= trunc <= basis.count:
        raise ValueError(f"truncation {trunc} outside 0..{basis.count}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    C = coefficient_matrix(kernel, basis)[:, :trunc]
    xi = _normal_block(count, trunc, seed, "series")
    data = xi @ C.T
    data.setflags(write=False)
    meta = SampleMeta(generator="series", basis=basis.kind, truncation=trunc, seed=int(seed))
    return FieldSamples(grid=kernel.grid, data=data, meta=meta)


def sample_factor(
    model: cov.CovarianceModel,
    grid: Grid,
    count: int = 1,
    seed: int = 0,
    clip_tol: float = mercer.DEFAULT_CLIP_TOL,
) -> FieldSamples:
    """Ground-truth sampler: multiply the spectral factor of the Gram matrix.

    Realizations have discrete covariance exactly equal to the clipped
    Gram matrix, independent of any basis or truncation choice.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    decomp = mercer.decompose(model, grid, clip_tol=clip_tol)
    r = decomp.rank
    factor = decomp.eigenfunctions[:, :r] * np.sqrt(decomp.eigenvalues[:r])
    xi = _normal_block(count, r, seed, "factor")
    data = xi @ factor.T
    data.setflags(write=False)
    meta = SampleMeta(generator="factor", basis=None, truncation=r, seed=int(seed))
    return FieldSamples(grid=grid, data=data, meta=meta)


def white_noise_increments(grid: Grid, count: int = 1, seed: int = 0) -> np.ndarray:
    """Per-cell white-noise integrals: independent N(0, w_j), one row per realization."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    xi = _normal_block(count, grid.size, seed, "white_noise")
    return xi * np.sqrt(grid.weights)


def empirical_covariance(samples: FieldSamples) -> np.ndarray:
    """Non-centered covariance estimate (1/M) sum_m X_m X_m^T (fields are centered)."""
    M = samples.data.shape[0]
    if M < 2:
        raise ValueError(f"need at least 2 realizations, got {M}")
    C = (samples.data.T @ samples.data) / M
    return (C + C.T) / 2


def monte_carlo_band(covariance_matrix: np.ndarray, count: int, z: float = 3.0) -> np.ndarray:
    """Per-entry z-sigma band for the empirical covariance of M Gaussian draws.

    Var(X_t X_s) = R(t,t) R(s,s) + R(t,s)^2 for centered jointly Gaussian
    variables, so the estimator's standard error is sqrt(Var / M).
    """
    d = np.diag(covariance_matrix)
    return z * np.sqrt((np.outer(d, d) + covariance_matrix**2) / count)


def truncation_errors(
    kernel: mercer.FredholmKernel, basis: Basis, variance_diag: np.ndarray
) -> np.ndarray:
    """Deterministic L2 truncation error of the series, for K = 0..count.

    Entry K is sum_i w_i (R(t_i, t_i) - sum_{k < K} c_k(t_i)^2); for a
    complete basis the curve decreases to the clipping residue.
    """
    C = coefficient_matrix(kernel, basis)
    w = basis.grid.weights
    per_mode = np.sum(C**2 * w[:, None], axis=0)
    total = float(np.sum(w * variance_diag))
    return total - np.concatenate([[0.0], np.cumsum(per_mode)])
