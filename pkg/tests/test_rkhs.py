import numpy as np
import pytest
from numpy.testing import assert_allclose

from fgf import covariance as cov
from fgf import mercer, rkhs
from fgf.grid import build_grid


@pytest.fixture(scope="module")
def setup_32():
    g = build_grid(1, 32)
    m = cov.brownian_sheet(1)
    d = mercer.decompose(m, g)
    return g, cov.gram(m, g), d, mercer.square_root_kernel(d)


def test_kernel_range_accepted(setup_32):
    g, _, _, k = setup_32
    rng = np.random.default_rng(5)
    for _ in range(5):
        f = k.K @ (g.weights * rng.normal(size=g.size))
        elem = rkhs.project_membership(k, f)
        assert elem.accepted
        assert elem.residual <= 1e-10


def test_covariance_slices_are_members(setup_32):
    g, G, _, k = setup_32
    elem = rkhs.project_membership(k, G[:, 7])
    assert elem.accepted and elem.relative_residual <= 1e-10


def test_reproducing_property(setup_32):
    # inner product of two covariance slices returns the gram entry
    g, G, _, k = setup_32
    for i, j in [(3, 3), (3, 20), (10, 31)]:
        fi = rkhs.project_membership(k, G[:, i])
        fj = rkhs.project_membership(k, G[:, j])
        assert rkhs.rkhs_inner(fi, fj) == pytest.approx(G[i, j], abs=1e-8)
    assert rkhs.rkhs_norm(fi) == pytest.approx(np.sqrt(G[10, 10]), abs=1e-8)


def test_null_component_rejected(setup_32):
    g, _, d, _ = setup_32
    half = mercer.square_root_kernel(d, truncation=16)
    # an eigenfunction beyond the truncation lies entirely in the null space
    f = d.eigenfunctions[:, 20]
    elem = rkhs.project_membership(half, f)
    assert not elem.accepted
    assert elem.relative_residual > 1e-6


def test_mixed_member_plus_null(setup_32):
    g, _, d, _ = setup_32
    half = mercer.square_root_kernel(d, truncation=16)
    member = d.eigenfunctions[:, 2]
    noise = d.eigenfunctions[:, 25]
    elem = rkhs.project_membership(half, member + 1e-3 * noise)
    assert not elem.accepted  # null part is far above the 1e-8 tolerance
    elem2 = rkhs.project_membership(half, member + 1e-3 * noise, tol=1e-2)
    assert elem2.accepted


def test_minimum_norm_optimality(setup_32):
    g, _, d, _ = setup_32
    half = mercer.square_root_kernel(d, truncation=16)
    f = half.K @ (g.weights * d.eigenfunctions[:, 4])
    elem = rkhs.project_membership(half, f)
    base = float(np.sum(g.weights * elem.preimage**2))
    rng = np.random.default_rng(9)
    for _ in range(5):
        # any preimage differing by a null vector represents the same f
        null = d.eigenfunctions[:, 16:] @ rng.normal(size=16)
        other = elem.preimage + null
        assert_allclose(half.K @ (g.weights * other), f, atol=1e-10)
        assert np.sum(g.weights * other**2) > base


def test_zero_kernel_only_contains_zero():
    g = build_grid(1, 8)
    kz = mercer.square_root_kernel(mercer.decompose(cov.zero_field(1), g))
    assert rkhs.project_membership(kz, np.zeros(8)).accepted
    assert not rkhs.project_membership(kz, np.ones(8)).accepted


def test_constant_kernel_constants():
    # K is the all-ones matrix: preimage of f = c is the constant c, norm |c|
    g = build_grid(1, 8)
    k = mercer.square_root_kernel(mercer.decompose(cov.constant_field(1.0, 1), g))
    a = rkhs.project_membership(k, np.full(8, 3.0))
    b = rkhs.project_membership(k, np.full(8, -2.0))
    assert a.accepted and b.accepted
    assert_allclose(a.preimage, np.full(8, 3.0), atol=1e-12)
    assert rkhs.rkhs_norm(a) == pytest.approx(3.0, abs=1e-12)
    assert rkhs.rkhs_inner(a, b) == pytest.approx(-6.0, abs=1e-12)


def test_inner_bilinear_symmetric_cauchy_schwarz(setup_32):
    g, G, _, k = setup_32
    f = rkhs.project_membership(k, G[:, 4])
    h = rkhs.project_membership(k, G[:, 19])
    combo = rkhs.project_membership(k, 2.0 * G[:, 4] + 3.0 * G[:, 19])
    assert rkhs.rkhs_inner(f, h) == pytest.approx(rkhs.rkhs_inner(h, f), abs=1e-14)
    assert rkhs.rkhs_inner(combo, h) == pytest.approx(
        2.0 * rkhs.rkhs_inner(f, h) + 3.0 * rkhs.rkhs_inner(h, h), rel=1e-10
    )
    lhs = rkhs.rkhs_inner(f, h) ** 2
    assert lhs <= rkhs.rkhs_inner(f, f) * rkhs.rkhs_inner(h, h) + 1e-12


def test_kernel_mismatch_rejected(setup_32):
    g, G, d, k = setup_32
    half = mercer.square_root_kernel(d, truncation=16)
    a = rkhs.project_membership(k, G[:, 3])
    b = rkhs.project_membership(half, half.K @ (g.weights * G[:, 5]))
    assert a.accepted and b.accepted
    with pytest.raises(ValueError, match="different kernels"):
        rkhs.rkhs_inner(a, b)


def test_zero_function_is_member(setup_32):
    _, _, _, k = setup_32
    elem = rkhs.project_membership(k, np.zeros(32))
    assert elem.accepted
    assert elem.residual == 0.0 and elem.relative_residual == 0.0
    assert rkhs.rkhs_norm(elem) == 0.0


def test_inner_requires_membership(setup_32):
    g, G, d, k = setup_32
    half = mercer.square_root_kernel(d, truncation=16)
    good = rkhs.project_membership(k, G[:, 5])
    bad = rkhs.project_membership(half, d.eigenfunctions[:, 20])
    with pytest.raises(ValueError):
        rkhs.rkhs_inner(good, bad)


def test_grid_mismatch_rejected(setup_32):
    _, G, _, k = setup_32
    other_grid = build_grid(1, 16)
    other = mercer.square_root_kernel(mercer.decompose(cov.brownian_sheet(1), other_grid))
    a = rkhs.project_membership(k, G[:, 3])
    b = rkhs.project_membership(other, cov.gram(cov.brownian_sheet(1), other_grid)[:, 3])
    with pytest.raises(ValueError):
        rkhs.rkhs_inner(a, b)


def test_bad_inputs(setup_32):
    _, _, _, k = setup_32
    with pytest.raises(ValueError):
        rkhs.project_membership(k, np.zeros(31))
    with pytest.raises(ValueError):
        rkhs.project_membership(k, np.full(32, np.nan))
