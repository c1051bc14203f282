import numpy as np
import pytest
from numpy.testing import assert_allclose

from fgf import covariance as cov
from fgf import mercer, sampling
from fgf.grid import build_grid


@pytest.fixture(scope="module")
def kernel_16():
    g = build_grid(1, 16)
    d = mercer.decompose(cov.brownian_sheet(1), g)
    return g, mercer.square_root_kernel(d)


@pytest.mark.parametrize("kind", sampling.BASIS_KINDS)
@pytest.mark.parametrize("n", [1, 2])
def test_basis_weighted_orthonormal(kind, n):
    g = build_grid(n, 8)
    b = sampling.make_basis(kind, g)
    gram_b = b.values.T @ (g.weights[:, None] * b.values)
    assert_allclose(gram_b, np.eye(g.size), atol=1e-12)


def test_basis_leading_function_constant():
    g = build_grid(1, 8)
    for kind in ("haar", "trigonometric"):
        b = sampling.make_basis(kind, g)
        assert np.array_equal(b.values[:, 0], np.ones(8))


def test_haar_needs_power_of_two():
    with pytest.raises(ValueError):
        sampling.make_basis("haar", build_grid(1, 12))


def test_basis_count_validation():
    g = build_grid(1, 8)
    assert sampling.make_basis("trigonometric", g, count=3).count == 3
    for bad in (0, 9):
        with pytest.raises(ValueError):
            sampling.make_basis("trigonometric", g, count=bad)
    with pytest.raises(ValueError):
        sampling.make_basis("fourier", g)


def test_coefficients_parseval_across_bases(kernel_16):
    g, k = kernel_16
    grams = []
    for kind in sampling.BASIS_KINDS:
        C = sampling.coefficient_matrix(k, sampling.make_basis(kind, g))
        grams.append(C @ C.T)
    assert_allclose(grams[0], grams[1], atol=1e-12)
    assert_allclose(grams[0], grams[2], atol=1e-12)
    # complete-basis coefficient gram is the reconstructed covariance
    assert_allclose(grams[0], mercer.reconstruct_covariance(k), atol=1e-12)


def test_coefficient_field_matches_matrix(kernel_16):
    g, k = kernel_16
    b = sampling.make_basis("haar", g)
    C = sampling.coefficient_matrix(k, b)
    # matrix-matrix and matrix-vector BLAS paths differ in the last ulp
    assert_allclose(sampling.coefficient_field(k, b, 3), C[:, 3], rtol=1e-13, atol=1e-15)
    with pytest.raises(IndexError):
        sampling.coefficient_field(k, b, 16)


def test_series_bitwise_reproducible(kernel_16):
    g, k = kernel_16
    b = sampling.make_basis("trigonometric", g)
    s1 = sampling.sample_series(k, b, count=4, seed=11)
    s2 = sampling.sample_series(k, b, count=4, seed=11)
    assert np.array_equal(s1.data, s2.data)
    s3 = sampling.sample_series(k, b, count=4, seed=12)
    assert not np.array_equal(s1.data, s3.data)


def test_substreams_independent_of_batch_size(kernel_16):
    g, k = kernel_16
    b = sampling.make_basis("trigonometric", g)
    big = sampling.sample_series(k, b, count=6, seed=11)
    small = sampling.sample_series(k, b, count=3, seed=11)
    assert np.array_equal(big.data[:3], small.data)


def test_generator_tags_give_distinct_streams():
    a = sampling.realization_rng(0, "series", 0).standard_normal(4)
    b = sampling.realization_rng(0, "factor", 0).standard_normal(4)
    c = sampling.realization_rng(0, "white_noise", 0).standard_normal(4)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)
    with pytest.raises(ValueError):
        sampling.realization_rng(-1, "series", 0)


def test_truncated_series_spans_leading_coefficients(kernel_16):
    g, k = kernel_16
    b = sampling.make_basis("trigonometric", g)
    s = sampling.sample_series(k, b, truncation=5, count=3, seed=2)
    C = sampling.coefficient_matrix(k, b)[:, :5]
    # each realization lies in the span of the first five coefficient fields
    resid = s.data.T - C @ np.linalg.lstsq(C, s.data.T, rcond=None)[0]
    assert np.linalg.norm(resid) <= 1e-10
    assert s.meta.truncation == 5
    with pytest.raises(ValueError):
        sampling.sample_series(k, b, truncation=17)


def test_factor_sampler_matches_covariance():
    g = build_grid(1, 8)
    m = cov.brownian_sheet(1)
    s = sampling.sample_factor(m, g, count=4000, seed=0)
    emp = sampling.empirical_covariance(s)
    target = cov.gram(m, g)
    band = sampling.monte_carlo_band(target, 4000)
    assert np.mean(np.abs(emp - target) <= band) >= 0.97


def test_zero_field_samples_are_zero():
    g = build_grid(1, 8)
    s = sampling.sample_factor(cov.zero_field(1), g, count=3, seed=0)
    assert np.array_equal(s.data, np.zeros((3, 8)))


def test_white_noise_cell_variance():
    g = build_grid(1, 4)
    inc = sampling.white_noise_increments(g, count=8000, seed=0)
    var = np.mean(inc**2, axis=0)
    # each cell integral has variance w = 1/4
    assert_allclose(var, 0.25, rtol=0.1)


def test_empirical_covariance_needs_two_rows(kernel_16):
    g, k = kernel_16
    b = sampling.make_basis("trigonometric", g)
    s = sampling.sample_series(k, b, count=1, seed=0)
    with pytest.raises(ValueError):
        sampling.empirical_covariance(s)


def test_band_shrinks_like_root_m():
    R = cov.gram(cov.brownian_sheet(1), build_grid(1, 6))
    b100 = sampling.monte_carlo_band(R, 100)
    b400 = sampling.monte_carlo_band(R, 400)
    assert_allclose(b100, 2.0 * b400, rtol=1e-12)
    assert np.all(b100 > 0.0)


def test_truncation_errors_decrease_to_zero(kernel_16):
    g, k = kernel_16
    b = sampling.make_basis("haar", g)
    diag = cov.variance_diagonal(cov.brownian_sheet(1), g)
    errs = sampling.truncation_errors(k, b, diag)
    assert errs.shape == (17,)
    assert errs[0] == pytest.approx(cov.trace(cov.brownian_sheet(1), g).value, abs=1e-14)
    assert np.all(np.diff(errs) <= 1e-14)
    assert errs[-1] <= 1e-10


def test_grid_mismatch_rejected(kernel_16):
    _, k = kernel_16
    b = sampling.make_basis("trigonometric", build_grid(1, 8))
    with pytest.raises(ValueError):
        sampling.coefficient_matrix(k, b)
