"""Fredholm-kernel representations of multiparameter Gaussian fields.

Construction pipeline: an admissible covariance model on the cube [0,1]^n
is discretized on a tensor midpoint grid, eigendecomposed in the weighted
L2 geometry, and square-rooted into a symmetric Fredholm kernel. The
kernel drives series samplers over arbitrary orthonormal bases, Volterra
equivalence transforms, and reproducing-kernel-space queries.
"""

from .covariance import (
    KINDS,
    CovarianceModel,
    NonFiniteCovarianceError,
    SizeBudgetError,
    TraceResult,
    brownian_sheet,
    constant_field,
    evaluate,
    fractional_brownian_sheet,
    gram,
    tabulated,
    trace,
    variance_diagonal,
    zero_field,
)
from .equivalence import (
    VolterraKernel,
    constant_perturbation,
    cumulative_sheet,
    equivalent_covariance,
    gaussian_bump_perturbation,
    transform_kernel,
    transform_noise,
    volterra_project,
)
from .grid import Grid, build_grid, flat_index, multi_index, same_grid
from .mercer import (
    FredholmKernel,
    MercerDecomposition,
    NotPositiveSemidefiniteError,
    clipped_gram,
    decompose,
    reconstruct_covariance,
    square_root_kernel,
    weighted_square,
)
from .rkhs import RkhsElement, project_membership, rkhs_inner, rkhs_norm
from .sampling import (
    BASIS_KINDS,
    Basis,
    FieldSamples,
    SampleMeta,
    coefficient_field,
    coefficient_matrix,
    empirical_covariance,
    make_basis,
    monte_carlo_band,
    realization_rng,
    sample_factor,
    sample_series,
    truncation_errors,
    white_noise_increments,
)

__version__ = "0.1.0"

__all__ = [
    "BASIS_KINDS",
    "Basis",
    "CovarianceModel",
    "FieldSamples",
    "FredholmKernel",
    "Grid",
    "KINDS",
    "MercerDecomposition",
    "NonFiniteCovarianceError",
    "NotPositiveSemidefiniteError",
    "RkhsElement",
    "SampleMeta",
    "SizeBudgetError",
    "TraceResult",
    "VolterraKernel",
    "brownian_sheet",
    "build_grid",
    "clipped_gram",
    "coefficient_field",
    "coefficient_matrix",
    "constant_field",
    "constant_perturbation",
    "cumulative_sheet",
    "decompose",
    "empirical_covariance",
    "equivalent_covariance",
    "evaluate",
    "flat_index",
    "fractional_brownian_sheet",
    "gaussian_bump_perturbation",
    "gram",
    "make_basis",
    "monte_carlo_band",
    "multi_index",
    "project_membership",
    "realization_rng",
    "reconstruct_covariance",
    "rkhs_inner",
    "rkhs_norm",
    "same_grid",
    "sample_factor",
    "sample_series",
    "square_root_kernel",
    "tabulated",
    "trace",
    "transform_kernel",
    "transform_noise",
    "truncation_errors",
    "variance_diagonal",
    "volterra_project",
    "weighted_square",
    "white_noise_increments",
    "zero_field",
]
