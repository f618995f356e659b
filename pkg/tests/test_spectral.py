import numpy as np
import pytest

from logpr.errors import DisconnectedGraphError
from logpr.generators import chain, knn_geometric
from logpr.graph import build_graph
from logpr.spectral import lazy_walk_eigenpairs, smallest_eigenpairs, spectral_embedding

from conftest import cycle


def test_chain_eigenvalues_closed_form():
    n = 50
    b = spectral_embedding(chain(n), k=4)
    # normalized Laplacian of a path: 1 - cos(pi j / (n - 1))
    np.testing.assert_allclose(b.eigenvalues, 1 - np.cos(np.pi * np.arange(5) / (n - 1)),
                               atol=1e-12)
    c = spectral_embedding(chain(n), k=3, laplacian="combinatorial")
    np.testing.assert_allclose(c.eigenvalues, 2 - 2 * np.cos(np.pi * np.arange(4) / n),
                               atol=1e-12)


def test_chain_fiedler_vector_is_cosine():
    n = 40
    b = spectral_embedding(chain(n), k=1, laplacian="combinatorial")
    z = np.cos(np.pi * (np.arange(n) + 0.5) / n)
    z /= np.linalg.norm(z)
    assert abs(abs(b.vector(2) @ z) - 1) < 1e-10


def test_trivial_vector_and_orthonormality():
    g = knn_geometric(300, 6, rng_seed=0)
    b = spectral_embedding(g, k=3)
    d = np.sqrt(g.degrees)
    np.testing.assert_allclose(b.vector(1), d / np.linalg.norm(d), atol=1e-15)
    V = b.eigenvectors
    np.testing.assert_allclose(V.T @ V, np.eye(4), atol=1e-9)
    assert np.all(b.residuals <= 1e-6)
    Y = b.coordinates(g)
    # generalized eigenvectors are D-orthogonal to the ones vector
    np.testing.assert_allclose(g.degrees @ Y, 0, atol=1e-9)


def test_sparse_path_matches_dense():
    g = knn_geometric(400, 6, rng_seed=2)
    d = spectral_embedding(g, k=2, method="dense")
    s = spectral_embedding(g, k=2, method="sparse")
    np.testing.assert_allclose(s.eigenvalues, d.eigenvalues, atol=1e-10)
    for j in range(1, 3):
        assert abs(abs(s.eigenvectors[:, j] @ d.eigenvectors[:, j]) - 1) < 1e-8


def test_long_chain_sparse():
    # eigenvalues near 1e-6 must still be resolved by shift-invert
    n = 3000
    b = spectral_embedding(chain(n), k=2, method="sparse")
    np.testing.assert_allclose(b.eigenvalues[1:], 1 - np.cos(np.pi * np.arange(1, 3) / (n - 1)),
                               rtol=1e-6)


def test_degenerate_cycle_flagged():
    b = spectral_embedding(cycle(20), k=2)
    assert b.degenerate[1] and b.degenerate[2]


def test_errors():
    with pytest.raises(DisconnectedGraphError):
        spectral_embedding(build_graph([(0, 1), (2, 3)]))
    with pytest.raises(ValueError):
        spectral_embedding(chain(5), k=5)
    with pytest.raises(ValueError):
        spectral_embedding(chain(5), laplacian="signless")
    with pytest.raises(ValueError):
        smallest_eigenpairs(chain(5).laplacian(), 2, method="qr")


def test_lazy_walk_eigenpairs():
    g = knn_geometric(100, 4, rng_seed=3)
    w = lazy_walk_eigenpairs(g, k=2)
    assert w.eigenvalues[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(w.eigenvalues) <= 0)
    W = g.walk_matrix("lazy")
    np.testing.assert_allclose(W @ w.eigenvectors, w.eigenvectors * w.eigenvalues, atol=1e-9)
