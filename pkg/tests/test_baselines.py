import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expandgraph.baselines import (preferential_attachment, training_mean, uniform_attachment,
                                   user_mean_prediction)
from expandgraph.graph import Graph, barabasi_albert, erdos_renyi
from expandgraph.optimizer import TrainingSet


@given(st.integers(1, 200))
def test_uniform(n):
    p = uniform_attachment(n)
    assert p.shape == (n,) and np.all(p == 1 / n)
    assert p.sum() == pytest.approx(1.0)


@given(st.integers(3, 60), st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_preferential_is_normalized_degree(n, seed):
    g = barabasi_albert(n, 2, seed)
    p = preferential_attachment(g)
    assert np.all((p >= 0) & (p <= 1))
    assert p.sum() == pytest.approx(1.0)
    deg = g.to_dense().sum(axis=1)
    np.testing.assert_allclose(p, deg / deg.sum())
    np.testing.assert_array_equal(p, preferential_attachment(g))


def test_preferential_needs_edges():
    with pytest.raises(ValueError):
        preferential_attachment(Graph.from_dense(np.zeros((3, 3))))
    with pytest.raises(ValueError):
        uniform_attachment(0)


def test_training_mean():
    ts = TrainingSet([1.0, 2.0], [[0.5, 0.0], [0.3, 0.2]], [[1, 0], [1, 1]])
    b, a = training_mean(ts)
    np.testing.assert_allclose(b, [1.0, 0.5])
    np.testing.assert_allclose(a, [0.4, 0.1])
    assert np.all((b >= 0) & (b <= 1))


def test_user_mean():
    assert user_mean_prediction([1, 2, 4]) == pytest.approx(7 / 3)
    with pytest.raises(ValueError):
        user_mean_prediction([])


def test_preferential_er_close_to_uniform():
    g = erdos_renyi(500, 0.2, 0)
    assert np.abs(preferential_attachment(g) - uniform_attachment(500)).max() < 1e-3
