import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from fgf.grid import build_grid, flat_index, multi_index, same_grid


def test_nodes_are_midpoints():
    g = build_grid(1, 8)
    assert_allclose(g.nodes[:, 0], (np.arange(8) + 0.5) / 8, rtol=0, atol=0)


def test_weights_are_uniform_cells():
    g = build_grid(2, 5)
    assert g.weights.shape == (25,)
    assert np.all(g.weights == 5.0**-2)
    assert_allclose(g.weights.sum(), 1.0, rtol=1e-14)


def test_flat_order_last_axis_fastest():
    g = build_grid(2, 4)
    # node (i, j) sits at flat position i * N + j
    for i in range(4):
        for j in range(4):
            k = flat_index(g, (i, j))
            assert k == i * 4 + j
            assert_allclose(g.nodes[k], [(i + 0.5) / 4, (j + 0.5) / 4], rtol=0, atol=0)


def test_nodes_interior():
    g = build_grid(3, 3)
    assert np.all(g.nodes > 0.0) and np.all(g.nodes < 1.0)


@given(st.integers(1, 3), st.integers(1, 6), st.data())
def test_flat_multi_round_trip(n, N, data):
    g = build_grid(n, N)
    flat = data.draw(st.integers(0, g.size - 1))
    assert flat_index(g, multi_index(g, flat)) == flat


def test_index_range_errors():
    g = build_grid(2, 4)
    with pytest.raises(IndexError):
        flat_index(g, (0, 4))
    with pytest.raises(IndexError):
        flat_index(g, (0,))
    with pytest.raises(IndexError):
        multi_index(g, 16)
    with pytest.raises(IndexError):
        multi_index(g, -1)


def test_arrays_read_only():
    g = build_grid(1, 4)
    with pytest.raises(ValueError):
        g.nodes[0, 0] = 0.0
    with pytest.raises(ValueError):
        g.weights[0] = 0.0


def test_invalid_parameters():
    with pytest.raises(ValueError):
        build_grid(0, 4)
    with pytest.raises(ValueError):
        build_grid(1, 0)


def test_same_grid():
    assert same_grid(build_grid(2, 3), build_grid(2, 3))
    assert not same_grid(build_grid(2, 3), build_grid(2, 4))
    assert not same_grid(build_grid(1, 3), build_grid(2, 3))
