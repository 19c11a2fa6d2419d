import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from expandgraph.graph import (Graph, barabasi_albert, degree_vector, erdos_renyi, expand,
                               laplacian_eigenbasis, read_edgelist, smooth_signal,
                               write_edgelist)


def test_rejects_self_loops_and_asymmetry():
    with pytest.raises(ValueError):
        Graph.from_dense(np.eye(3))
    with pytest.raises(ValueError):
        Graph.from_dense([[0, 1], [0, 0]])
    Graph.from_dense([[0, 1], [0, 0]], directed=True)


def test_rejects_non_square_and_nonfinite():
    with pytest.raises(ValueError):
        Graph(sp.csr_array(np.zeros((2, 3))))
    with pytest.raises(ValueError):
        Graph.from_dense([[0, np.inf], [np.inf, 0]])


@given(st.integers(2, 30), st.floats(0.0, 1.0), st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_expand_truncate_round_trip(n, p_edge, seed):
    g = erdos_renyi(n, p_edge, seed)
    a = np.random.default_rng(seed).uniform(0, 1, n)
    back = expand(g, a).truncate()
    assert (back.adjacency != g.adjacency).nnz == 0
    np.testing.assert_array_equal(back.to_dense(), g.to_dense())


def test_expanded_block_structure():
    g = erdos_renyi(6, 0.5, 3)
    a = np.arange(6, dtype=float)
    A = expand(g, a).adjacency.toarray()
    np.testing.assert_array_equal(A[:6, :6], g.to_dense())
    np.testing.assert_array_equal(A[6, :6], a)
    np.testing.assert_array_equal(A[:, 6], 0)


def test_expand_validates_length():
    with pytest.raises(ValueError):
        expand(erdos_renyi(4, 0.5, 0), np.ones(3))


@pytest.mark.parametrize("make", [lambda s: erdos_renyi(50, 0.1, s),
                                  lambda s: barabasi_albert(50, 3, s)])
def test_generator_determinism(make):
    a, b, c = make(7), make(7), make(8)
    np.testing.assert_array_equal(a.to_dense(), b.to_dense())
    assert not np.array_equal(a.to_dense(), c.to_dense())


@given(st.integers(2, 40), st.integers(1, 5), st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_ba_edge_count(n, m, seed):
    if m >= n:
        m = n - 1
    g = barabasi_albert(n, m, seed)
    expected = m * (m - 1) // 2 + m * (n - m)
    assert g.num_edges == expected
    assert degree_vector(g).sum() == 2 * g.num_edges


def test_ba_matches_degree_proportional_growth():
    # hubs from the seed clique should carry more degree than late arrivals on average
    degs = np.mean([degree_vector(barabasi_albert(200, 2, s)) for s in range(20)], axis=0)
    assert degs[:10].mean() > 3 * degs[-50:].mean()


def test_er_edge_density():
    g = erdos_renyi(400, 0.05, 11)
    expected = 0.05 * 400 * 399 / 2
    assert abs(g.num_edges - expected) < 4 * np.sqrt(expected)


def test_eigenbasis_sorted_and_sign_fixed():
    g = erdos_renyi(30, 0.2, 4)
    vals, vecs = laplacian_eigenbasis(g)
    assert np.all(np.diff(vals) >= 0)
    L = np.diag(degree_vector(g)) - g.to_dense()
    np.testing.assert_allclose(L @ vecs, vecs * vals, atol=1e-9)
    idx = np.argmax(np.abs(vecs), axis=0)
    assert np.all(vecs[idx, np.arange(30)] > 0)


@given(st.integers(3, 40), st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_smooth_signal_zero_mean(n, seed):
    g = erdos_renyi(n, 0.3, seed)
    x = smooth_signal(g, max(1, n // 3), seed)
    assert abs(x.mean()) < 1e-12


def test_smooth_signal_is_low_frequency():
    g = erdos_renyi(60, 0.15, 2)
    vals, vecs = laplacian_eigenbasis(g)
    x = smooth_signal(g, 10, 5)
    energy = (vecs.T @ x) ** 2
    assert energy[10:].sum() < 1e-20 + 1e-12 * energy.sum()


@pytest.mark.parametrize("directed", [False, True])
def test_edgelist_round_trip(tmp_path, directed):
    rng = np.random.default_rng(0)
    A = np.triu(rng.uniform(0.1, 2, (8, 8)) * (rng.random((8, 8)) < 0.4), 1)
    if not directed:
        A = A + A.T
    else:
        A = A + np.tril(rng.uniform(0.1, 2, (8, 8)) * (rng.random((8, 8)) < 0.3), -1)
    g = Graph.from_dense(A, directed=directed)
    write_edgelist(g, tmp_path / "g.edges")
    h = read_edgelist(tmp_path / "g.edges")
    assert h.directed == directed and h.n == 8
    np.testing.assert_array_equal(h.to_dense(), A)


def test_undirected_edgelist_lists_each_edge_once(tmp_path):
    g = Graph.from_edges(3, [(0, 1, 1.0), (1, 2, 2.0)])
    write_edgelist(g, tmp_path / "g.edges")
    body = [ln for ln in (tmp_path / "g.edges").read_text().splitlines() if not ln.startswith("#")]
    assert body == ["0\t1\t1.0", "1\t2\t2.0"]
