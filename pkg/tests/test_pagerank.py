import math

import numpy as np
import pytest
import scipy.linalg as la
from hypothesis import given, settings, strategies as st

from logpr.errors import DisconnectedGraphError
from logpr.generators import chain, knn_geometric
from logpr.graph import build_graph
from logpr.pagerank import (PageRankConfig, chain_closed_form, chain_log_approx,
                            lazy_to_standard_alpha, pagerank, prepare)

from conftest import complete


def dense_pagerank(g, v, alpha, kind):
    P = g.walk_matrix(kind).toarray()
    return la.lu_solve(la.lu_factor(np.eye(g.n) - alpha * P), (1 - alpha) * v)


@pytest.mark.parametrize("alpha", [0.3, 0.9, 0.99])
def test_single_edge_hand_values(alpha):
    g = build_graph([(0, 1)])
    np.testing.assert_allclose(pagerank(g, 0, alpha, "standard"),
                               [1 / (1 + alpha), alpha / (1 + alpha)], rtol=1e-13)
    np.testing.assert_allclose(pagerank(g, 0, alpha, "lazy"),
                               [1 - alpha / 2, alpha / 2], rtol=1e-13)


def test_triangle_hand_values(triangle):
    # P has eigenvalues 1 and -1/2 on the complement of the ones vector
    a = 0.8
    x = pagerank(triangle, 0, a, "standard")
    c = (1 - a) / (1 + a / 2)
    expected = np.full(3, 1 / 3) + c * (np.eye(3)[0] - 1 / 3)
    np.testing.assert_allclose(x, expected, rtol=1e-13)


@pytest.mark.parametrize("kind", ["lazy", "standard"])
def test_matches_dense_lu(kind, rng):
    g = knn_geometric(80, 4, rng_seed=2)
    solver = prepare(g, PageRankConfig(0.95, kind))
    V = rng.random((80, 5))
    V /= V.sum(axis=0)
    X, res = solver.solve_matrix(V)
    np.testing.assert_allclose(X, dense_pagerank(g, V, 0.95, kind), atol=1e-13)
    assert np.all(res <= 1e-12)


def test_iterative_agrees_with_direct():
    g = knn_geometric(100, 5, rng_seed=1)
    d = prepare(g, PageRankConfig(0.9, "lazy", "direct")).solve_seed(7).values
    it = prepare(g, PageRankConfig(0.9, "lazy", "iterative", tol=1e-13)).solve_seed(7).values
    np.testing.assert_allclose(it, d, atol=1e-11)


def test_alpha_zero_is_teleport(path10):
    x = pagerank(path10, 4, 0.0)
    np.testing.assert_array_equal(x, np.eye(10)[4])


def test_solve_seeds_columns(path10):
    s = prepare(path10, PageRankConfig(0.9))
    X = s.solve_seeds([3, 0, 3])
    np.testing.assert_allclose(X[:, 0], s.solve_seed(3).values, atol=1e-15)
    np.testing.assert_array_equal(X[:, 0], X[:, 2])


def test_rejects_bad_inputs(path10):
    with pytest.raises(ValueError):
        PageRankConfig(alpha=1.0)
    with pytest.raises(ValueError):
        PageRankConfig(walk_kind="teleport")
    s = prepare(path10)
    with pytest.raises(ValueError, match="sum to 1"):
        s.solve(np.ones(10))
    with pytest.raises(ValueError, match="shape"):
        s.solve(np.ones(3) / 3)
    with pytest.raises(DisconnectedGraphError):
        prepare(build_graph([(0, 1), (2, 3)]))


def test_lazy_equals_standard_at_mapped_alpha():
    g = knn_geometric(60, 4, rng_seed=5)
    for a in (0.5, 0.99, 0.9999):
        lazy = pagerank(g, 3, a, "lazy")
        std = pagerank(g, 3, lazy_to_standard_alpha(a), "standard")
        np.testing.assert_allclose(lazy, std, atol=1e-12)


def test_stationary_limit_on_regular_graph():
    g = complete(6)
    x = pagerank(g, 0, 0.999999)
    np.testing.assert_allclose(x, 1 / 6, atol=1e-5)


@pytest.mark.parametrize("n", [10, 30, 100, 3000])
@pytest.mark.parametrize("kind", ["standard", "lazy"])
def test_chain_exact_closed_form(n, kind):
    g = chain(n)
    for k in (1, 2, n // 2, n - 1, n):
        for a in (0.5, 0.85, 0.99, 0.9999):
            x = pagerank(g, k - 1, a, kind)
            np.testing.assert_allclose(chain_closed_form(n, k, a, kind), x, atol=1e-12, rtol=0)


def test_chain_printed_form_shares_the_profile():
    # the printed expression has the right shape away from the seed but a
    # different scale, and its seed entry lacks the (1 - alpha) factor
    n, k, a = 200, 100, 0.5
    x = pagerank(chain(n), k - 1, a, "standard")
    p = chain_closed_form(n, k, a, "standard", form="printed")
    interior = np.r_[1:k - 2, k:n - 2]
    np.testing.assert_allclose(p[interior] / p[interior + 1], x[interior] / x[interior + 1],
                               rtol=1e-10)
    assert abs(p[k - 1] / p[k] - x[k - 1] / x[k]) > 1e-2


def test_chain_log_approx_slope():
    a = 0.99
    plus = (1 + math.sqrt(1 - a * a)) / a
    v = chain_log_approx(100, 50, a, np.array([50.0, 51.0, 53.0]))
    np.testing.assert_allclose(np.diff(v), [-math.log(plus), -2 * math.log(plus)])
    assert isinstance(chain_log_approx(100, 50, a, 50), float)
    with pytest.raises(ValueError):
        chain_closed_form(2, 1, 0.5)
    with pytest.raises(ValueError):
        chain_closed_form(10, 11, 0.5)


@st.composite
def connected_graphs(draw):
    n = draw(st.integers(3, 25))
    perm = draw(st.permutations(range(n)))
    # random spanning tree plus extra edges keeps every draw connected
    edges = [(perm[i], perm[draw(st.integers(0, i - 1))], draw(st.floats(0.1, 5)))
             for i in range(1, n)]
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1),
                                    st.floats(0.1, 5)), max_size=2 * n))
    return build_graph(edges + [e for e in extra if e[0] != e[1]], n=n)


@settings(max_examples=150, deadline=None)
@given(connected_graphs(), st.floats(0.05, 0.999), st.sampled_from(["lazy", "standard"]),
       st.data())
def test_pagerank_properties(g, alpha, kind, data):
    s = prepare(g, PageRankConfig(alpha, kind))
    seed = data.draw(st.integers(0, g.n - 1))
    pr = s.solve_seed(seed)
    x = pr.values
    assert np.all(x > 0)
    assert abs(x.sum() - 1) <= 1e-8
    assert pr.residual <= 1e-8
    w = data.draw(st.floats(0.0, 1.0))
    other = data.draw(st.integers(0, g.n - 1))
    v = w * np.eye(g.n)[seed] + (1 - w) * np.eye(g.n)[other]
    mix = s.solve(v).values
    np.testing.assert_allclose(mix, w * x + (1 - w) * s.solve_seed(other).values, atol=1e-10)
