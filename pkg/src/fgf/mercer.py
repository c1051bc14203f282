"""Spectral factorization of covariance operators on the grid.

The covariance operator is discretized by quadrature (Nystrom scheme) and
symmetrized in the weighted geometry: with D = diag(weights), the matrix
B = D^{1/2} G D^{1/2} is symmetric, its eigenvectors u_k map back to
grid-sampled eigenfunctions phi_k = D^{-1/2} u_k that are orthonormal in
the weighted inner product, and the eigenvalues approximate those of the
continuum operator. The square-root kernel

    K[i, j] = sum_k sqrt(lambda_k) phi_k(t_i) phi_k(t_j)

then reproduces the covariance through the weighted product
sum_m K[i, m] w_m K[j, m].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import covariance as cov
from .grid import Grid

#: Relative eigenvalue floor: values in [-clip_tol * lam_max, 0) are treated
#: as floating noise and zeroed; anything below is a hard PSD failure.
DEFAULT_CLIP_TOL = 1e-10


class NotPositiveSemidefiniteError(ArithmeticError):
    """An eigenvalue fell below the clip floor: the matrix is not a covariance."""

    def __init__(self, message: str, worst: float, floor: float):
        super().__init__(message)
        self.worst = worst
        self.floor = floor


@dataclass(frozen=True, eq=False)
class MercerDecomposition:
    """Eigenvalues and grid-sampled eigenfunctions of a covariance operator.

    Eigenvalues are nonincreasing and nonnegative; eigenfunction column k
    holds phi_k at the grid nodes, orthonormal under the quadrature
    weights. ``clipped_mass`` is the total magnitude of negative noise
    eigenvalues that were zeroed.
    """

    grid: Grid
    eigenvalues: np.ndarray     # (R,), nonincreasing, all >= 0
    eigenfunctions: np.ndarray  # (P, R)
    clipped_mass: float

    @property
    def rank(self) -> int:
        """Number of strictly positive eigenvalues."""
        return int(np.count_nonzero(self.eigenvalues > 0.0))


@dataclass(frozen=True, eq=False)
class FredholmKernel:
    """Grid-sampled symmetric square-root kernel K(t_i, t_j)."""

    grid: Grid
    K: np.ndarray  # (P, P), symmetric


def weighted_eigh(matrix: np.ndarray, weights: np.ndarray):
    """Eigen-pairs of a symmetric kernel matrix in the weighted L2 geometry.

    Returns (values, functions) in ascending eigenvalue order (the
    eigensolver's order); function columns are orthonormal under the
    weights.
    """
    sqrt_w = np.sqrt(weights)
    B = matrix * np.outer(sqrt_w, sqrt_w)
    vals, vecs = np.linalg.eigh(B)
    return vals, vecs / sqrt_w[:, None]


def _fix_signs(funcs: np.ndarray) -> np.ndarray:
    # sign convention: the first component of largest magnitude is positive
    lead = np.argmax(np.abs(funcs), axis=0)
    signs = np.sign(funcs[lead, np.arange(funcs.shape[1])])
    signs[signs == 0.0] = 1.0
    return funcs * signs


def decompose(
    model: cov.CovarianceModel,
    grid: Grid,
    clip_tol: float = DEFAULT_CLIP_TOL,
    max_points: int = cov.DEFAULT_MAX_POINTS,
) -> MercerDecomposition:
    """Symmetrized Nystrom eigen-decomposition of a covariance on a grid.

    Eigenvalues below clip_tol * lam_max are zeroed — this removes both
    negative floating noise (whose magnitude accumulates into
    ``clipped_mass``) and positive noise from rank-deficient models, so
    e.g. a constant field comes out exactly rank one. An eigenvalue below
    -clip_tol * lam_max raises :class:`NotPositiveSemidefiniteError`.
    Output order is deterministic: eigenvalues nonincreasing with
    eigensolver order as tie-break, eigenfunction signs fixed by the
    leading component.
    """
    if not 0.0 <= clip_tol < 1.0:
        raise ValueError(f"clip_tol must lie in [0, 1), got {clip_tol}")
    G = cov.gram(model, grid, max_points=max_points)
    if not np.all(np.isfinite(G)):
        i, j = map(int, np.argwhere(~np.isfinite(G))[0])
        raise cov.NonFiniteCovarianceError(
            f"covariance matrix entry ({i}, {j}) is not finite"
        )
    vals, funcs = weighted_eigh(G, grid.weights)
    lam_max = max(float(vals[-1]), 0.0)
    floor = -clip_tol * lam_max
    worst = float(vals[0])
    if worst < floor:
        raise NotPositiveSemidefiniteError(
            f"eigenvalue {worst:.6e} below the clip floor {floor:.6e}: "
            "matrix is not positive semidefinite",
            worst=worst,
            floor=floor,
        )
    clipped_mass = abs(float(vals[vals < 0.0].sum()))
    vals = np.where(vals < clip_tol * lam_max, 0.0, vals)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    funcs = _fix_signs(funcs[:, order])
    vals.setflags(write=False)
    funcs.setflags(write=False)
    return MercerDecomposition(
        grid=grid, eigenvalues=vals, eigenfunctions=funcs, clipped_mass=clipped_mass
    )


def square_root_kernel(
    decomp: MercerDecomposition, truncation: Optional[int] = None
) -> FredholmKernel:
    """Symmetric square-root kernel from the retained eigenpairs.

    ``truncation`` caps the number of leading eigenpairs; default keeps
    all of them. The result is exactly symmetric.
    """
    total = decomp.eigenvalues.size
    r = total if truncation is None else int(truncation)
    if not 0 <= r <= total:
        raise ValueError(f"truncation {r} outside 0..{total}")
    lam = decomp.eigenvalues[:r]
    phi = decomp.eigenfunctions[:, :r]
    K = (phi * np.sqrt(lam)) @ phi.T
    K = (K + K.T) / 2  # entrywise a+b == b+a, so this is bitwise symmetric
    K.setflags(write=False)
    return FredholmKernel(grid=decomp.grid, K=K)


def weighted_square(K: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """The covariance sum_m K[i, m] w_m K[j, m] implied by a kernel matrix."""
    R = (K * weights) @ K.T
    return (R + R.T) / 2


def reconstruct_covariance(kernel: FredholmKernel) -> np.ndarray:
    """Covariance matrix reproduced by the kernel through the weighted product."""
    return weighted_square(kernel.K, kernel.grid.weights)


def clipped_gram(decomp: MercerDecomposition) -> np.ndarray:
    """Gram matrix implied by the clipped spectrum (the reconstruction target)."""
    G = (decomp.eigenfunctions * decomp.eigenvalues) @ decomp.eigenfunctions.T
    return (G + G.T) / 2
